//! Positive reals stored through their natural logarithm.
//!
//! The Landau constant is of order `10^1191` already for `n = 1`, far beyond
//! `f64`. A [`LogNumber`] keeps `ln x` as an arbitrary-precision float, so
//! products and powers are additions and multiplications of logarithms.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};

const RM: RoundingMode = RoundingMode::ToEven;
/// Extra working bits carried through compound evaluations.
pub const GUARD_BITS: usize = 64;

thread_local! {
    static CONSTS: RefCell<Consts> =
        RefCell::new(Consts::new().expect("constants cache initialization"));
}

/// Runs `f` with this thread's constants cache.
pub fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Natural log of `x` at `p` bits.
pub fn big_ln(x: &BigFloat, p: usize) -> BigFloat {
    with_consts(|cc| x.ln(p, RM, cc))
}

pub fn big_exp(x: &BigFloat, p: usize) -> BigFloat {
    with_consts(|cc| x.exp(p, RM, cc))
}

/// Parses a decimal literal (integers of any size included) at `p` bits.
pub fn big_from_decimal(s: &str, p: usize) -> BigFloat {
    with_consts(|cc| BigFloat::parse(s, Radix::Dec, p, RM, cc))
}

/// Full decimal expansion as produced by the library (scientific form).
pub fn big_to_scientific(x: &BigFloat) -> String {
    with_consts(|cc| x.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".to_string())
}

/// Nearest `f64`.
pub fn big_to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if x.is_zero() {
        return 0.0;
    }
    let s = big_to_scientific(x);
    s.parse::<f64>().unwrap_or(f64::NAN)
}

/// Positional decimal rendering with `sig` significant digits, rounded half-up.
pub fn big_to_fixed(x: &BigFloat, sig: usize) -> String {
    let s = big_to_scientific(x);
    scientific_to_fixed(&s, sig)
}

fn scientific_to_fixed(s: &str, sig: usize) -> String {
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (mantissa, exponent) = match body.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().unwrap_or(0)),
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let mut digits: Vec<u8> = int_part.bytes().chain(frac_part.bytes()).map(|b| b - b'0').collect();
    // position of the decimal point relative to the start of `digits`
    let mut point = int_part.len() as i64 + exponent;
    let lead = digits.iter().position(|&d| d != 0);
    let Some(lead) = lead else {
        return "0".to_string();
    };
    digits.drain(..lead);
    point -= lead as i64;
    if digits.len() > sig {
        let round_up = digits[sig] >= 5;
        digits.truncate(sig);
        if round_up {
            let mut i = sig;
            loop {
                if i == 0 {
                    digits.insert(0, 1);
                    point += 1;
                    break;
                }
                i -= 1;
                if digits[i] == 9 {
                    digits[i] = 0;
                } else {
                    digits[i] += 1;
                    break;
                }
            }
            digits.truncate(sig);
        }
    }
    digits.resize(sig.max(digits.len()), 0);
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    let text: String = digits.iter().map(|d| (b'0' + d) as char).collect();
    if point <= 0 {
        out.push_str("0.");
        out.push_str(&"0".repeat((-point) as usize));
        out.push_str(&text);
    } else if point as usize >= text.len() {
        out.push_str(&text);
        out.push_str(&"0".repeat(point as usize - text.len()));
    } else {
        out.push_str(&text[..point as usize]);
        out.push('.');
        out.push_str(&text[point as usize..]);
    }
    out
}

/// Decimal digits carried by `bits` binary digits.
pub fn decimal_digits(bits: usize) -> usize {
    (bits as f64 * std::f64::consts::LOG10_2).floor() as usize
}

/// A positive real `exp(ln_value)`.
#[derive(Clone)]
pub struct LogNumber {
    ln: BigFloat,
    precision: usize,
}

impl fmt::Debug for LogNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogNumber(ln = {})", self.ln_decimal())
    }
}

impl LogNumber {
    pub fn from_ln(ln: BigFloat, precision: usize) -> Self {
        let mut ln = ln;
        // rounding to the working precision cannot fail for finite values
        let _ = ln.set_precision(precision, RM);
        LogNumber { ln, precision }
    }

    /// `None` unless `x > 0`.
    pub fn from_f64(x: f64, precision: usize) -> Option<Self> {
        if !(x > 0.0) || !x.is_finite() {
            return None;
        }
        let big = BigFloat::from_f64(x, precision + GUARD_BITS);
        Some(Self::from_ln(big_ln(&big, precision + GUARD_BITS), precision))
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn ln_value(&self) -> &BigFloat {
        &self.ln
    }

    pub fn ln_f64(&self) -> f64 {
        big_to_f64(&self.ln)
    }

    pub fn log10_value(&self) -> BigFloat {
        let p = self.precision + GUARD_BITS;
        let ten = BigFloat::from_u64(10, p);
        let mut out = self.ln.div(&big_ln(&ten, p), p, RM);
        let _ = out.set_precision(self.precision, RM);
        out
    }

    pub fn log10_f64(&self) -> f64 {
        big_to_f64(&self.log10_value())
    }

    /// `ln` as a positional decimal string with every digit the precision supports.
    pub fn ln_decimal(&self) -> String {
        big_to_fixed(&self.ln, decimal_digits(self.precision))
    }

    pub fn log10_decimal(&self) -> String {
        big_to_fixed(&self.log10_value(), decimal_digits(self.precision))
    }

    fn working(&self, other: &LogNumber) -> usize {
        self.precision.max(other.precision)
    }

    pub fn mul(&self, other: &LogNumber) -> LogNumber {
        let p = self.working(other);
        LogNumber::from_ln(self.ln.add(&other.ln, p + GUARD_BITS, RM), p)
    }

    pub fn div(&self, other: &LogNumber) -> LogNumber {
        let p = self.working(other);
        LogNumber::from_ln(self.ln.sub(&other.ln, p + GUARD_BITS, RM), p)
    }

    /// `x^e` for a real exponent `e`.
    pub fn pow(&self, exponent: &BigFloat) -> LogNumber {
        let p = self.precision;
        LogNumber::from_ln(self.ln.mul(exponent, p + GUARD_BITS, RM), p)
    }

    /// Multiplies by a positive `f64`.
    pub fn scale(&self, factor: f64) -> Option<LogNumber> {
        LogNumber::from_f64(factor, self.precision).map(|f| self.mul(&f))
    }

    /// `x + y`, evaluated as `max + ln(1 + exp(min − max))`.
    pub fn add(&self, other: &LogNumber) -> LogNumber {
        let p = self.working(other) + GUARD_BITS;
        let (hi, lo) = if self.compare(other) == Ordering::Less { (other, self) } else { (self, other) };
        let gap = lo.ln.sub(&hi.ln, p, RM);
        let one = BigFloat::from_u64(1, p);
        let tail = big_ln(&one.add(&big_exp(&gap, p), p, RM), p);
        LogNumber::from_ln(hi.ln.add(&tail, p, RM), self.working(other))
    }

    /// `x − y` when positive.
    pub fn checked_sub(&self, other: &LogNumber) -> Option<LogNumber> {
        if self.compare(other) != Ordering::Greater {
            return None;
        }
        let p = self.working(other) + GUARD_BITS;
        let gap = other.ln.sub(&self.ln, p, RM);
        let one = BigFloat::from_u64(1, p);
        let factor = one.sub(&big_exp(&gap, p), p, RM);
        if !factor.is_positive() || factor.is_zero() {
            return None;
        }
        let tail = big_ln(&factor, p);
        Some(LogNumber::from_ln(self.ln.add(&tail, p, RM), self.working(other)))
    }

    pub fn compare(&self, other: &LogNumber) -> Ordering {
        match self.ln.cmp(&other.ln) {
            Some(x) if x < 0 => Ordering::Less,
            Some(0) => Ordering::Equal,
            Some(_) => Ordering::Greater,
            None => Ordering::Equal,
        }
    }

    /// `ln(self / other)` as `f64`.
    pub fn ln_ratio(&self, other: &LogNumber) -> f64 {
        let p = self.working(other) + GUARD_BITS;
        big_to_f64(&self.ln.sub(&other.ln, p, RM))
    }

    /// Absolute difference of the logarithms, as `f64`.
    pub fn ln_distance(&self, other: &LogNumber) -> f64 {
        let p = self.working(other) + GUARD_BITS;
        big_to_f64(&self.ln.sub(&other.ln, p, RM)).abs()
    }
}

impl PartialEq for LogNumber {
    fn eq(&self, other: &Self) -> bool {
        self.compare(other) == Ordering::Equal
    }
}
