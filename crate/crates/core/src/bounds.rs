//! Certified enclosures for the explicit constants of the nonexistence
//! theorem and the field-size threshold they produce.
//!
//! Every real number here is carried as an [`Enclosure`] of two exact
//! rationals. Square roots come from integer square roots, `exp` from a
//! Taylor sum with a Lagrange remainder, `log` from an `atanh` series, and
//! the infinite series from a partial sum plus a geometric tail.
//!
//! The theorem's decimal constants are re-derived from the series: each
//! quantity is rounded up to a step (0.01 reproduces the printed
//! constants, 0.0001 the finer recomputation) and the threshold is
//!
//! ```text
//! ceil((c0 + c1 g) * exp(e0 + e1 g) * s^2)
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, int, rat, Rational};

/// Term cap for the series.
pub const SERIES_TERM_CAP: usize = 10_000;
/// Term cap for the exponential and logarithm.
pub const TAYLOR_TERM_CAP: usize = 1_000;
/// Largest argument accepted by [`exp_enclosure`].
pub const EXP_ARG_MAX: i64 = 64;

/// A closed interval `[lo, hi]` known to contain some real value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enclosure {
    #[serde(with = "rational::serde_text")]
    pub lo: Rational,
    #[serde(with = "rational::serde_text")]
    pub hi: Rational,
}

impl Enclosure {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Enclosure { lo, hi }
    }

    pub fn exact(v: Rational) -> Self {
        Enclosure { lo: v.clone(), hi: v }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    /// Both ends within `tol` of `v`.
    pub fn brackets(&self, v: &Rational, tol: &Rational) -> bool {
        &self.lo >= &(v - tol) && &self.hi <= &(v + tol)
    }

    /// Product of two enclosures of nonnegative values.
    pub fn mul_nonneg(&self, other: &Enclosure) -> Enclosure {
        debug_assert!(!self.lo.is_negative() && !other.lo.is_negative());
        Enclosure::new(&self.lo * &other.lo, &self.hi * &other.hi)
    }

    /// Scaling by a nonnegative rational.
    pub fn scale(&self, k: &Rational) -> Enclosure {
        debug_assert!(!k.is_negative());
        Enclosure::new(&self.lo * k, &self.hi * k)
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        Enclosure::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            rational::to_decimal(&self.lo, 10),
            rational::to_decimal_ceil(&self.hi, 10)
        )
    }
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

/// Binary digits needed so that `2^-bits <= precision`.
fn bits_for(precision: &Rational) -> u32 {
    let inv = (Rational::one() / precision).ceil().to_integer();
    inv.bits() as u32 + 1
}

/// `sqrt(x)` for `x >= 0`, with width at most `precision`.
pub fn sqrt_enclosure(x: &Rational, precision: &Rational) -> Result<Enclosure> {
    if x.is_negative() {
        return Err(Error::InvalidInput("square root of a negative number".into()));
    }
    check_precision(precision)?;
    // sqrt(n/d) = sqrt(n d) / d.
    let n = x.numer();
    let d = x.denom();
    let nd = n * d;
    let root = nd.sqrt();
    if &root * &root == nd {
        return Ok(Enclosure::exact(Rational::new(root, d.clone())));
    }
    let bits = bits_for(precision);
    let scale = pow2(bits);
    let scaled = (&nd * &scale * &scale).sqrt();
    let lo = Rational::new(scaled.clone(), d * &scale);
    let hi = Rational::new(scaled + 1, d * &scale);
    Ok(Enclosure::new(lo, hi))
}

fn check_precision(precision: &Rational) -> Result<()> {
    if precision.is_positive() {
        Ok(())
    } else {
        Err(Error::InvalidInput("precision must be positive".into()))
    }
}

/// `exp(x)` for `0 <= x <= 64`.
pub fn exp_enclosure(x: &Rational, precision: &Rational) -> Result<Enclosure> {
    check_precision(precision)?;
    if x.is_negative() || *x > int(EXP_ARG_MAX) {
        return Err(Error::InvalidInput(format!(
            "exp argument {} outside [0, {EXP_ARG_MAX}]",
            rational::to_text(x)
        )));
    }
    if x.is_zero() {
        return Ok(Enclosure::exact(Rational::one()));
    }
    // e^x <= 3^ceil(x) bounds the Lagrange remainder factor e^xi.
    let growth = num_traits::pow(int(3), x.ceil().to_integer().to_usize().expect("x <= 64"));
    let mut sum = Rational::zero();
    let mut term = Rational::one();
    for n in 0..TAYLOR_TERM_CAP {
        sum += &term;
        term = term * x / int(n as u64 + 1);
        // term = x^(n+1)/(n+1)!, the remainder after n+1 terms is at most term * growth.
        let remainder = &term * &growth;
        if remainder <= *precision {
            return Ok(Enclosure::new(sum.clone(), sum + remainder));
        }
    }
    Err(Error::PrecisionUnreachable { cap: TAYLOR_TERM_CAP })
}

/// `2 atanh(z)` for `0 <= z <= 1/3`, i.e. `ln((1+z)/(1-z))`.
fn two_atanh(z: &Rational, precision: &Rational) -> Result<Enclosure> {
    if z.is_zero() {
        return Ok(Enclosure::exact(Rational::zero()));
    }
    let z2 = z * z;
    let tail_factor = Rational::one() / (Rational::one() - &z2);
    let mut sum = Rational::zero();
    let mut power = z.clone();
    for k in 0..TAYLOR_TERM_CAP {
        sum += &power / int(2 * k as u64 + 1);
        power *= &z2;
        // Remaining terms are at most power/(2k+3) * 1/(1-z^2).
        let tail = &power / int(2 * k as u64 + 3) * &tail_factor;
        let width = int(2) * &tail;
        if width <= *precision {
            let lo = int(2) * &sum;
            return Ok(Enclosure::new(lo.clone(), lo + width));
        }
    }
    Err(Error::PrecisionUnreachable { cap: TAYLOR_TERM_CAP })
}

/// `ln(x)` for `x >= 1`.
pub fn ln_enclosure(x: &Rational, precision: &Rational) -> Result<Enclosure> {
    check_precision(precision)?;
    if *x < Rational::one() {
        return Err(Error::InvalidInput("log argument must be at least 1".into()));
    }
    // x = 2^m * y with 1 <= y < 2.
    let mut m = 0u64;
    let mut y = x.clone();
    let two = int(2);
    while y >= two {
        y /= &two;
        m += 1;
    }
    let share = precision / int(2 * m + 2);
    let ln2 = two_atanh(&rat(1, 3), &share)?;
    let one = Rational::one();
    let ln_y = two_atanh(&((&y - &one) / (&y + &one)), &share)?;
    Ok(ln2.scale(&int(m)).add(&ln_y))
}

/// The five series behind the theorem's constants, at cutoff `q0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Series {
    /// `sum 2/(n q0^{n/2})`
    S1,
    /// `sum 1/(n q0^{n-1}) + 2/(n q0^{3n/2-1})`
    S2,
    /// `sum 4/(n q0^{3n/2-1})`
    S3,
    /// `sum n^5/q0^{n-1} + 2 n^5/q0^{3n/2-1}`
    S4,
    /// `sum 4 n^5/q0^{3n/2-1}`
    S5,
}

impl Series {
    pub const ALL: [Series; 5] = [Series::S1, Series::S2, Series::S3, Series::S4, Series::S5];

    pub fn name(self) -> &'static str {
        match self {
            Series::S1 => "S1",
            Series::S2 => "S2",
            Series::S3 => "S3",
            Series::S4 => "S4",
            Series::S5 => "S5",
        }
    }

    pub fn formula(self) -> &'static str {
        match self {
            Series::S1 => "sum 2/(n q0^(n/2))",
            Series::S2 => "sum 1/(n q0^(n-1)) + 2/(n q0^(3n/2-1))",
            Series::S3 => "sum 4/(n q0^(3n/2-1))",
            Series::S4 => "sum n^5/q0^(n-1) + 2n^5/q0^(3n/2-1)",
            Series::S5 => "sum 4n^5/q0^(3n/2-1)",
        }
    }

    /// Upper bound on `term(n+1)/term(n)` for every `n >= 1`.
    fn ratio_bound(self, q0: &Rational, root: &Enclosure) -> Rational {
        match self {
            Series::S4 | Series::S5 => int(32) / q0,
            _ => Rational::one() / &root.lo,
        }
    }

    /// Enclosure of term `n`, given `q0^{1/2}` enclosed by `root`.
    fn term(self, n: u32, q0: &Rational, root: &Enclosure) -> Enclosure {
        // q0^{k/2} for k >= 0, low and high.
        let half_power = |k: u32| -> Enclosure {
            let whole = num_traits::pow(q0.clone(), (k / 2) as usize);
            if k % 2 == 0 {
                Enclosure::exact(whole)
            } else {
                root.scale(&whole)
            }
        };
        let inv = |e: Enclosure| Enclosure::new(Rational::one() / &e.hi, Rational::one() / &e.lo);
        let nn = int(n);
        let n5 = int(n as u64).pow(5);
        // q0^{-(n-1)} and q0^{-(3n/2-1)} = q0^{-(3n-2)/2}.
        let lin = inv(half_power(2 * (n - 1)));
        let three_halves = inv(half_power(3 * n - 2));
        let inv_n = Rational::one() / &nn;
        match self {
            Series::S1 => inv(half_power(n)).scale(&(int(2) * &inv_n)),
            Series::S2 => lin.scale(&inv_n).add(&three_halves.scale(&(int(2) * &inv_n))),
            Series::S3 => three_halves.scale(&(int(4) * &inv_n)),
            Series::S4 => lin.scale(&n5).add(&three_halves.scale(&(int(2) * &n5))),
            Series::S5 => three_halves.scale(&(int(4) * &n5)),
        }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Partial sum plus geometric tail, with width at most `precision`.
pub fn series_enclosure(series: Series, q0: &Rational, precision: &Rational) -> Result<Enclosure> {
    check_precision(precision)?;
    let root = sqrt_enclosure(q0, &(precision / int(1u64 << 20)))?;
    let ratio = series.ratio_bound(q0, &root);
    if ratio >= Rational::one() || *q0 <= Rational::one() {
        return Err(Error::InvalidInput(format!(
            "cutoff {} too small for a convergent tail bound on {series}",
            rational::to_text(q0)
        )));
    }
    let tail_factor = Rational::one() / (Rational::one() - &ratio);
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    let mut next = series.term(1, q0, &root);
    for n in 1..=SERIES_TERM_CAP as u32 {
        lo += &next.lo;
        hi += &next.hi;
        next = series.term(n + 1, q0, &root);
        // Terms n+1, n+2, ... sum to at most term(n+1) / (1 - ratio).
        let tail = &next.hi * &tail_factor;
        let upper = &hi + &tail;
        if &upper - &lo <= *precision {
            return Ok(Enclosure::new(lo, upper));
        }
    }
    Err(Error::PrecisionUnreachable { cap: SERIES_TERM_CAP })
}

/// Upper bound for the number of degree-`n` primes of genus `g` over
/// `GF(q)`: `q^n/n + (2+4g) q^{n/2}/n`. `q^{n/2}` is bounded from above.
pub fn pi_upper(q: u64, n: u32, g: u32) -> Result<Rational> {
    if q < 4 {
        return Err(Error::InvalidInput(format!("prime-counting bound needs q >= 4, got {q}")));
    }
    if n == 0 {
        return Err(Error::InvalidInput("degree must be at least 1".into()));
    }
    let qn = Rational::from_integer(BigInt::from(q).pow(n));
    let root = sqrt_enclosure(&qn, &rat(1, 1 << 30))?;
    let nn = int(n);
    Ok(&qn / &nn + int(2 + 4 * g as u64) * root.hi / nn)
}

/// How the theorem's decimals are re-derived.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rounding {
    pub q0: Rational,
    /// Step for every constant except the prefactor.
    pub step: Rational,
    /// Step for the prefactor `(q0/(q0-1))^2`.
    pub prefactor_step: Rational,
}

impl Rounding {
    pub fn new(q0: Rational, step: Rational) -> Self {
        Rounding {
            q0,
            prefactor_step: step.clone(),
            step,
        }
    }
}

/// The theorem's constants, as exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constants {
    #[serde(with = "rational::serde_text")]
    pub q0: Rational,
    /// Mertens additive constant, genus-free part (1.08).
    #[serde(with = "rational::serde_text")]
    pub mertens: Rational,
    /// Mertens additive constant, per unit genus (0.16).
    #[serde(with = "rational::serde_text")]
    pub mertens_genus: Rational,
    /// `(|P|/(|P|-1))^2` bound (1.01).
    #[serde(with = "rational::serde_text")]
    pub prefactor: Rational,
    /// Exponent, genus-free part (6.5).
    #[serde(with = "rational::serde_text")]
    pub exponent: Rational,
    /// Exponent, per unit genus (0.97).
    #[serde(with = "rational::serde_text")]
    pub exponent_genus: Rational,
    /// Leading factor, genus-free part (1.14).
    #[serde(with = "rational::serde_text")]
    pub leading: Rational,
    /// Leading factor, per unit genus (0.16).
    #[serde(with = "rational::serde_text")]
    pub leading_genus: Rational,
}

impl Constants {
    /// The printed constants.
    pub fn paper() -> Self {
        Constants {
            q0: int(700),
            mertens: rat(108, 100),
            mertens_genus: rat(16, 100),
            prefactor: rat(101, 100),
            exponent: rat(65, 10),
            exponent_genus: rat(97, 100),
            leading: rat(114, 100),
            leading_genus: rat(16, 100),
        }
    }

    /// Re-derives every constant from certified series enclosures, rounding
    /// upper ends up to the given steps.
    pub fn derive(rounding: &Rounding) -> Result<Derived> {
        let q0 = &rounding.q0;
        let step = &rounding.step;
        let precision = rat(1, 1_000_000_000);
        let mut series = Vec::with_capacity(5);
        for s in Series::ALL {
            series.push((s, series_enclosure(s, q0, &precision)?));
        }
        let hi = |s: Series| series[s as usize].1.hi.clone();
        let up = |r: Rational| rational::round_up(&r, step);
        let max = |a: Rational, b: Rational| if a > b { a } else { b };
        let one = Rational::one();

        let mertens = up(max(&one + hi(Series::S1), hi(Series::S2)));
        let mertens_genus = up(max(int(2) * hi(Series::S1), hi(Series::S3)));
        let ratio = q0 / (q0 - &one);
        let prefactor = rational::round_up(&(&ratio * &ratio), &rounding.prefactor_step);
        let growth = |m: &Rational| int(6) * m + int(11) * m / q0;
        let exponent = up(growth(&mertens));
        let exponent_genus = up(growth(&mertens_genus));
        let leading = up(&prefactor * hi(Series::S4));
        let leading_genus = up(&prefactor * hi(Series::S5));
        Ok(Derived {
            constants: Constants {
                q0: q0.clone(),
                mertens,
                mertens_genus,
                prefactor,
                exponent,
                exponent_genus,
                leading,
                leading_genus,
            },
            series,
        })
    }

    /// Each of `self`'s constants is at least the corresponding one in `other`.
    pub fn dominates(&self, other: &Constants) -> bool {
        self.mertens >= other.mertens
            && self.mertens_genus >= other.mertens_genus
            && self.prefactor >= other.prefactor
            && self.exponent >= other.exponent
            && self.exponent_genus >= other.exponent_genus
            && self.leading >= other.leading
            && self.leading_genus >= other.leading_genus
    }

    /// `(name, value)` in display order.
    pub fn table(&self) -> [(&'static str, &Rational); 7] {
        [
            ("mertens", &self.mertens),
            ("mertens_genus", &self.mertens_genus),
            ("prefactor", &self.prefactor),
            ("exponent", &self.exponent),
            ("exponent_genus", &self.exponent_genus),
            ("leading", &self.leading),
            ("leading_genus", &self.leading_genus),
        ]
    }

    /// `sum_{deg P <= N} 1/|P| <= log N + mertens + mertens_genus g`.
    pub fn mertens_log_bound(&self, n: u64, g: u32) -> Result<Rational> {
        if n == 0 {
            return Err(Error::InvalidInput("degree cutoff must be at least 1".into()));
        }
        let log = ln_enclosure(&int(n), &rat(1, 1_000_000_000_000))?;
        Ok(log.hi + &self.mertens + &self.mertens_genus * int(g))
    }

    /// `sum_P 1/|P|^2 <= (mertens + mertens_genus g)/q`.
    pub fn mertens_square_bound(&self, q: &Rational, g: u32) -> Rational {
        (&self.mertens + &self.mertens_genus * int(g)) / q
    }

    /// `exp(exponent + exponent_genus g)`.
    pub fn growth(&self, g: u32, precision: &Rational) -> Result<Enclosure> {
        exp_enclosure(&(&self.exponent + &self.exponent_genus * int(g)), precision)
    }

    /// `prefactor exp(exponent + exponent_genus g) s^2 d^6 / q^{2d}` for a
    /// prime of degree `d`.
    pub fn second_moment_bound(&self, degree: u32, q: &Rational, g: u32, s: u32, precision: &Rational) -> Result<Enclosure> {
        let s2 = int(s as u64 * s as u64);
        let d6 = int(degree as u64).pow(6);
        let k = &self.prefactor * s2 * d6 / num_traits::pow(q.clone(), 2 * degree as usize);
        let inner = precision / &k;
        Ok(self.growth(g, &inner)?.scale(&k))
    }

    /// `(leading + leading_genus g) exp(exponent + exponent_genus g) s^2`.
    pub fn threshold_value(&self, g: u32, s: u32, precision: &Rational) -> Result<Enclosure> {
        let lead = &self.leading + &self.leading_genus * int(g);
        let k = lead * int(s as u64 * s as u64);
        Ok(self.growth(g, &(precision / &k))?.scale(&k))
    }
}

/// Derived constants together with the series enclosures they came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derived {
    pub constants: Constants,
    pub series: Vec<(Series, Enclosure)>,
}

/// Which cutoff the constants use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// `q0 = 700`, printed constants.
    Paper,
    /// `q0 = 724`, re-derived at the fine step.
    Refined724,
}

impl Variant {
    pub fn q0(self) -> Rational {
        match self {
            Variant::Paper => int(700),
            Variant::Refined724 => int(724),
        }
    }
}

/// Step that reproduces the printed constants.
pub fn coarse_step() -> Rational {
    rat(1, 100)
}

/// Step of the finer recomputation.
pub fn fine_step() -> Rational {
    rat(1, 10_000)
}

/// The smallest integer field size the theorem covers, with the constants
/// and enclosure behind it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Threshold {
    pub q: BigInt,
    pub value: Enclosure,
    pub constants: Constants,
}

/// Constants for a variant: the printed ones for the default variant,
/// derived ones otherwise.
pub fn constants_for(variant: Variant, fine: bool) -> Result<Constants> {
    match (variant, fine) {
        (Variant::Paper, false) => Ok(Constants::paper()),
        (Variant::Paper, true) => Ok(Constants::derive(&Rounding::new(variant.q0(), fine_step()))?.constants),
        (Variant::Refined724, _) => Ok(Constants::derive(&Rounding::new(variant.q0(), fine_step()))?.constants),
    }
}

/// `ceil` of the threshold value, refining the enclosure until the ceiling
/// of both ends agrees.
pub fn threshold_with(constants: &Constants, g: u32, s: u32) -> Result<Threshold> {
    if s == 0 {
        return Err(Error::InvalidInput("multiplicity must be at least 1".into()));
    }
    let mut precision = rat(1, 10_000);
    for _ in 0..8 {
        let value = constants.threshold_value(g, s, &precision)?;
        let lo = value.lo.ceil().to_integer();
        let hi = value.hi.ceil().to_integer();
        if lo == hi {
            return Ok(Threshold {
                q: hi,
                value,
                constants: constants.clone(),
            });
        }
        precision /= int(1u64 << 32);
    }
    Err(Error::PrecisionUnreachable { cap: TAYLOR_TERM_CAP })
}

pub fn theorem_threshold(g: u32, s: u32, variant: Variant, fine: bool) -> Result<Threshold> {
    threshold_with(&constants_for(variant, fine)?, g, s)
}
