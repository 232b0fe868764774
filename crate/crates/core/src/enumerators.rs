//! Custom enumerators for the primitive types.
//!
//! Each enumerator picks a case with [`RandomState::weighted_switch`] and then
//! draws within the case. Case indices follow the weight arrays below and are
//! reported to an optional [`TraceSink`].

use std::sync::LazyLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::charsets::{Category, COMPOUND_EMOJI};
use crate::rng::{pow2, RandomState, WeightVector};
use crate::value::FloatValue;

/// Sum of powers of two, 65-bit magnitudes, powers of two off by one, -1, 0, 1.
pub const INT_WEIGHTS: [u32; 6] = [85, 6, 6, 1, 1, 1];

/// Rationals, small powers of two, large powers of two, 32-bit normal
/// extremes, 64-bit normal extremes, largest exact integers, subnormal
/// extremes, NaN, +inf, -inf, -0.
pub const FLOAT_WEIGHTS: [u32; 11] = [76, 5, 5, 3, 3, 2, 2, 1, 1, 1, 1];

/// ASCII, emoji, Greek, math symbols, Latin diacritics, compound emoji, mixed.
pub const STRING_WEIGHTS: [u32; 7] = [50, 2, 2, 2, 2, 2, 40];

/// Length bands: empty, [1, 32], [33, 512], [513, 10^4].
pub const LENGTH_WEIGHTS: [u32; 4] = [5, 80, 14, 1];
const LENGTH_BANDS: [(usize, usize); 4] = [(0, 0), (1, 32), (33, 512), (513, MAX_STRING_LEN)];

pub const MAX_STRING_LEN: usize = 10_000;

/// Retries for a zero denominator before falling back to 1.
const DENOMINATOR_RETRIES: usize = 8;

pub const FLOAT_CASE_RATIONAL: usize = 0;
pub const FLOAT_CASE_NAN: usize = 7;
pub const STRING_CASE_MIXED: usize = 6;

static INT_SWITCH: LazyLock<WeightVector> = LazyLock::new(|| WeightVector::new(INT_WEIGHTS.to_vec()).unwrap());
static FLOAT_SWITCH: LazyLock<WeightVector> = LazyLock::new(|| WeightVector::new(FLOAT_WEIGHTS.to_vec()).unwrap());
static STRING_SWITCH: LazyLock<WeightVector> = LazyLock::new(|| WeightVector::new(STRING_WEIGHTS.to_vec()).unwrap());
static LENGTH_SWITCH: LazyLock<WeightVector> = LazyLock::new(|| WeightVector::new(LENGTH_WEIGHTS.to_vec()).unwrap());

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Enumerator {
    Int,
    Float,
    Str,
    Length,
    Union,
}

/// Receives `(enumerator, case index)` for every case selection.
pub trait TraceSink {
    fn record(&mut self, enumerator: Enumerator, case: usize);
}

/// Discards trace events.
pub struct NoTrace;

impl TraceSink for NoTrace {
    #[inline]
    fn record(&mut self, _: Enumerator, _: usize) {}
}

impl TraceSink for Vec<(Enumerator, usize)> {
    fn record(&mut self, enumerator: Enumerator, case: usize) {
        self.push((enumerator, case));
    }
}

pub fn enum_int(state: RandomState) -> (BigInt, RandomState) {
    enum_int_traced(state, &mut NoTrace)
}

pub fn enum_int_traced<T: TraceSink + ?Sized>(state: RandomState, trace: &mut T) -> (BigInt, RandomState) {
    let (case, state) = state.weighted_switch(&INT_SWITCH);
    trace.record(Enumerator::Int, case);
    match case {
        0 => {
            let (a, state) = state.signed_power_of_two(0, 64).unwrap();
            let (b, state) = state.signed_power_of_two(0, 16).unwrap();
            (a + b, state)
        }
        1 => {
            let (low, state) = state.next_u64();
            let (high, state) = state.random_bool();
            let v = (BigInt::from(u8::from(high)) << 64) + BigInt::from(low);
            let (positive, state) = state.random_bool();
            let magnitude = v + 1;
            (if positive { magnitude } else { -magnitude }, state)
        }
        2 => {
            let (p, state) = state.signed_power_of_two(1, 65).unwrap();
            let (offset, state) = state.between(-1, 1);
            (p + offset, state)
        }
        3 => (BigInt::from(-1), state),
        4 => (BigInt::zero(), state),
        _ => (BigInt::one(), state),
    }
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `2^a (2^b - 2)`, the printed form of the normal-float upper extremes.
fn scaled_gap(a: i32, b: i32) -> BigRational {
    pow2(a) * (pow2(b) - int(2))
}

/// `2^a (1 - 2^b)`, the printed form of the largest subnormals.
fn subnormal_max(a: i32, b: i32) -> BigRational {
    pow2(a) * (int(1) - pow2(b))
}

static NORMAL_32: LazyLock<[BigRational; 6]> = LazyLock::new(|| {
    let top = scaled_gap(127, -23);
    [
        pow2(-126),
        pow2(-126) + int(1),
        pow2(-126) - int(1),
        top.clone(),
        top.clone() - int(1),
        top + int(1),
    ]
});

static NORMAL_64: LazyLock<[BigRational; 6]> = LazyLock::new(|| {
    let top = scaled_gap(1023, -52);
    [
        pow2(-1022),
        pow2(-1022) - int(1),
        pow2(-1022) + int(1),
        top.clone(),
        top.clone() - int(1),
        top + int(1),
    ]
});

static MAX_EXACT_INTEGERS: LazyLock<[BigRational; 4]> = LazyLock::new(|| [pow2(24), -pow2(24), pow2(53), -pow2(53)]);

static SUBNORMALS: LazyLock<[BigRational; 8]> = LazyLock::new(|| {
    [
        pow2(-149),
        -pow2(-149),
        subnormal_max(-126, -23),
        -subnormal_max(-126, -23),
        pow2(-1074),
        -pow2(-1074),
        subnormal_max(-1022, -52),
        -subnormal_max(-1022, -52),
    ]
});

/// The fixed value sets of float cases 3 through 6, in case order.
pub fn float_fixed_sets() -> [&'static [BigRational]; 4] {
    [&*NORMAL_32, &*NORMAL_64, &*MAX_EXACT_INTEGERS, &*SUBNORMALS]
}

fn pick(state: RandomState, set: &[BigRational]) -> (BigRational, RandomState) {
    let (i, state) = state.below(set.len() as u64);
    (set[i as usize].clone(), state)
}

fn off_by_one(state: RandomState, a: BigRational) -> (BigRational, RandomState) {
    let (offset, state) = state.between(-1, 1);
    (a + int(offset), state)
}

pub fn enum_float(state: RandomState) -> (FloatValue, RandomState) {
    enum_float_traced(state, &mut NoTrace)
}

pub fn enum_float_traced<T: TraceSink + ?Sized>(state: RandomState, trace: &mut T) -> (FloatValue, RandomState) {
    let (case, state) = state.weighted_switch(&FLOAT_SWITCH);
    trace.record(Enumerator::Float, case);
    let (value, state) = match case {
        FLOAT_CASE_RATIONAL => {
            let (numerator, mut state) = enum_int_traced(state, trace);
            let mut denominator = BigInt::zero();
            for _ in 0..=DENOMINATOR_RETRIES {
                let (k, next) = enum_int_traced(state, trace);
                state = next;
                if !k.is_zero() {
                    denominator = k;
                    break;
                }
            }
            if denominator.is_zero() {
                denominator = BigInt::one();
            }
            (BigRational::new(numerator, denominator), state)
        }
        1 => {
            let (a, state) = state.signed_power_of_two_rational(-64, 64).unwrap();
            off_by_one(state, a)
        }
        2 => {
            let ((negative, magnitude), state) = state.signed_exponent(65, 1024).unwrap();
            let (tiny, state) = state.random_bool();
            let exponent = if tiny { -magnitude } else { magnitude } as i32;
            let a = if negative { -pow2(exponent) } else { pow2(exponent) };
            off_by_one(state, a)
        }
        3 => pick(state, &*NORMAL_32),
        4 => pick(state, &*NORMAL_64),
        5 => pick(state, &*MAX_EXACT_INTEGERS),
        6 => pick(state, &*SUBNORMALS),
        FLOAT_CASE_NAN => return (FloatValue::Nan, state),
        8 => return (FloatValue::PosInf, state),
        9 => return (FloatValue::NegInf, state),
        _ => return (FloatValue::NegZero, state),
    };
    (FloatValue::Rational(value), state)
}

/// Length drawn from the shared band mixture, with each band clipped to `cap`.
pub fn draw_length<T: TraceSink + ?Sized>(state: RandomState, cap: usize, trace: &mut T) -> (usize, RandomState) {
    let (band, state) = state.weighted_switch(&LENGTH_SWITCH);
    trace.record(Enumerator::Length, band);
    let (lo, hi) = LENGTH_BANDS[band];
    let (lo, hi) = (lo.min(cap), hi.min(cap));
    let (len, state) = state.between(lo as i64, hi as i64);
    (len as usize, state)
}

/// Appends one unit of `category`: a single codepoint, or a whole compound
/// emoji sequence. Returns the number of codepoints appended.
fn push_unit(state: RandomState, category: Category, room: usize, out: &mut String) -> (usize, RandomState) {
    if room == 0 {
        return (0, state);
    }
    match category.range() {
        Some(r) => {
            let (cp, state) = state.between(i64::from(*r.start()), i64::from(*r.end()));
            out.push(char::from_u32(cp as u32).expect("alphabet ranges exclude surrogates"));
            (1, state)
        }
        None => {
            let (i, state) = state.below(COMPOUND_EMOJI.len() as u64);
            let seq = COMPOUND_EMOJI[i as usize];
            let n = seq.chars().count();
            if n > room {
                return (0, state);
            }
            out.push_str(seq);
            (n, state)
        }
    }
}

pub fn enum_string(state: RandomState) -> (String, RandomState) {
    enum_string_traced(state, &mut NoTrace)
}

pub fn enum_string_traced<T: TraceSink + ?Sized>(state: RandomState, trace: &mut T) -> (String, RandomState) {
    let (case, state) = state.weighted_switch(&STRING_SWITCH);
    trace.record(Enumerator::Str, case);
    let (units, mut state) = draw_length(state, MAX_STRING_LEN, trace);
    let mut out = String::new();
    let mut codepoints = 0;
    for _ in 0..units {
        let category = if case == STRING_CASE_MIXED {
            let (c, next) = state.below(Category::ALL.len() as u64);
            state = next;
            Category::ALL[c as usize]
        } else {
            Category::ALL[case]
        };
        let (added, next) = push_unit(state, category, MAX_STRING_LEN - codepoints, &mut out);
        state = next;
        if added == 0 {
            break;
        }
        codepoints += added;
    }
    (out, state)
}

pub fn enum_bytes(state: RandomState) -> (Vec<u8>, RandomState) {
    enum_bytes_traced(state, &mut NoTrace)
}

pub fn enum_bytes_traced<T: TraceSink + ?Sized>(state: RandomState, trace: &mut T) -> (Vec<u8>, RandomState) {
    let (len, mut state) = draw_length(state, MAX_STRING_LEN, trace);
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let (b, next) = state.below(256);
        out.push(b as u8);
        state = next;
    }
    (out, state)
}

pub fn enum_bool(state: RandomState) -> (bool, RandomState) {
    state.random_bool()
}

pub fn enum_none(state: RandomState) -> ((), RandomState) {
    ((), state)
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;
    use std::str::FromStr;

    use num_traits::Signed;

    use super::*;

    /// Runs `n` draws from seed and returns per-case frequencies for `which`.
    fn case_frequencies(
        n: usize,
        cases: usize,
        which: Enumerator,
        mut draw: impl FnMut(RandomState, &mut Vec<(Enumerator, usize)>) -> RandomState,
    ) -> Vec<f64> {
        let mut counts = vec![0usize; cases];
        let mut state = RandomState::from_seed(11);
        let mut trace = Vec::new();
        for _ in 0..n {
            trace.clear();
            state = draw(state, &mut trace);
            let top = trace.iter().find(|(e, _)| *e == which).unwrap();
            counts[top.1] += 1;
        }
        counts.iter().map(|&c| c as f64 / n as f64).collect()
    }

    fn state_at_case(weights: &WeightVector, case: usize) -> RandomState {
        (0..)
            .map(RandomState::from_seed)
            .find(|s| s.weighted_switch(weights).0 == case)
            .unwrap()
    }

    fn rational(s: &str) -> BigRational {
        BigRational::from_str(s).unwrap()
    }

    #[test]
    fn trivial_integer_cases() {
        for (case, expected) in [(3, -1), (4, 0), (5, 1)] {
            let (v, _) = enum_int(state_at_case(&INT_SWITCH, case));
            assert_eq!(v, BigInt::from(expected));
        }
    }

    #[test]
    fn integer_bound_and_large_magnitudes() {
        let bound = (BigInt::one() << 65) + 1;
        let big = BigInt::one() << 64;
        let mut state = RandomState::from_seed(3);
        let mut saw_big = false;
        for _ in 0..200_000 {
            let (v, next) = enum_int(state);
            state = next;
            assert!(v.abs() <= bound, "{v}");
            saw_big |= v.abs() > big;
        }
        assert!(saw_big);
    }

    /// Every value of each integer case must belong to that case's set.
    #[test]
    fn integer_cases_stay_in_their_sets() {
        let is_pow2 = |v: &BigInt| v.magnitude().count_ones() == 1;
        let mut state = RandomState::from_seed(17);
        for _ in 0..50_000 {
            let mut trace = Vec::new();
            let (v, next) = enum_int_traced(state, &mut trace);
            state = next;
            match trace[0].1 {
                0 => {
                    // a + b with |a| = 2^i, |b| = 2^j: try every j.
                    let ok = (0..=16).any(|j| {
                        let b = BigInt::one() << j;
                        [&v - &b, &v + &b]
                            .iter()
                            .any(|a| is_pow2(a) && a.magnitude().bits() <= 65)
                    });
                    assert!(ok, "{v}");
                }
                1 => assert!(v.abs() >= BigInt::one() && v.abs() <= BigInt::one() << 65),
                2 => {
                    let ok = [-1, 0, 1].iter().any(|d| {
                        let p: BigInt = &v - d;
                        is_pow2(&p) && (2..=66).contains(&p.magnitude().bits())
                    });
                    assert!(ok, "{v}");
                }
                _ => assert!(v.abs() <= BigInt::one()),
            }
        }
    }

    #[test]
    fn float_special_cases() {
        let (v, _) = enum_float(state_at_case(&FLOAT_SWITCH, FLOAT_CASE_NAN));
        assert_eq!(v, FloatValue::Nan);
        assert_eq!(enum_float(state_at_case(&FLOAT_SWITCH, 8)).0, FloatValue::PosInf);
        assert_eq!(enum_float(state_at_case(&FLOAT_SWITCH, 9)).0, FloatValue::NegInf);
        assert_eq!(enum_float(state_at_case(&FLOAT_SWITCH, 10)).0, FloatValue::NegZero);
    }

    /// Fixed sets checked against exact fractions computed independently.
    #[test]
    fn float_fixed_sets_match_printed_values() {
        let [n32, n64, exact, sub] = float_fixed_sets();
        assert_eq!(n32[0], rational("1/85070591730234615865843651857942052864"));
        assert_eq!(
            n32[1],
            rational("85070591730234615865843651857942052865/85070591730234615865843651857942052864")
        );
        // 2^127 (2^-23 - 2) = 2^104 - 2^128
        assert_eq!(n32[3], rational("-340282346638528859811704183484516925440"));
        assert!(n32[3].is_negative());
        assert_eq!(n64[3], -(pow2(1024)) + pow2(971));
        assert_eq!(
            exact,
            &[
                int(16777216),
                int(-16777216),
                int(9007199254740992),
                int(-9007199254740992)
            ]
        );
        assert_eq!(
            sub[2],
            rational("8388607/713623846352979940529142984724747568191373312")
        );
        assert_eq!(sub[4], BigRational::new(BigInt::one(), BigInt::one() << 1074));
        assert_eq!(sub[6], (pow2(52) - int(1)) * pow2(-1074));
        // 2^-149 and 2^-1074 are the smallest positive subnormals.
        assert_eq!(sub[0].to_string(), format!("1/{}", BigInt::one() << 149));
    }

    #[test]
    fn subnormal_case_can_yield_smallest_double() {
        let target = FloatValue::Rational(pow2(-1074));
        let found = (0..100_000u64).map(RandomState::from_seed).any(|s| {
            let mut trace = Vec::new();
            let (v, _) = enum_float_traced(s, &mut trace);
            trace[0].1 == 6 && v == target
        });
        assert!(found);
    }

    #[test]
    fn float_rationals_are_canonical() {
        let mut state = RandomState::from_seed(8);
        for _ in 0..100_000 {
            let (v, next) = enum_float(state);
            state = next;
            if let FloatValue::Rational(r) = v {
                assert!(r.denom().is_positive());
                assert!(num_integer::Integer::gcd(r.numer(), r.denom()).is_one());
            }
        }
    }

    #[test]
    fn float_power_cases_are_near_powers_of_two() {
        let mut state = RandomState::from_seed(21);
        for _ in 0..20_000 {
            let mut trace = Vec::new();
            let (v, next) = enum_float_traced(state, &mut trace);
            state = next;
            let case = trace[0].1;
            if case != 1 && case != 2 {
                continue;
            }
            let FloatValue::Rational(r) = v else { panic!() };
            let ok = [-1, 0, 1].iter().any(|d| {
                let a = &r - int(*d);
                let (n, k) = (a.numer().magnitude(), a.denom().magnitude());
                n.count_ones() == 1 && k.count_ones() == 1 && {
                    let e = n.bits() as i64 - k.bits() as i64;
                    if case == 1 {
                        e.abs() <= 64
                    } else {
                        (65..=1024).contains(&e.abs())
                    }
                }
            });
            assert!(ok, "case {case}: {r}");
        }
    }

    #[test]
    fn strings_respect_length_and_alphabet() {
        let mut state = RandomState::from_seed(5);
        for _ in 0..20_000 {
            let mut trace = Vec::new();
            let (s, next) = enum_string_traced(state, &mut trace);
            state = next;
            assert!(s.chars().count() <= MAX_STRING_LEN);
            let case = trace[0].1;
            if case < STRING_CASE_MIXED {
                let cat = Category::ALL[case];
                assert!(s.chars().all(|c| cat.contains(c)), "{cat:?}: {s:?}");
            } else {
                assert!(s.chars().all(|c| Category::ALL.iter().any(|cat| cat.contains(c))));
            }
        }
    }

    #[test]
    fn empty_string_occurs() {
        let found = (0..10_000u64).any(|seed| enum_string(RandomState::from_seed(seed)).0.is_empty());
        assert!(found);
    }

    #[test]
    fn string_case_frequencies() {
        let freq = case_frequencies(200_000, 7, Enumerator::Str, |s, t| enum_string_traced(s, t).1);
        assert!((freq[0] - 0.50).abs() < 0.01);
        assert!((freq[6] - 0.40).abs() < 0.01);
    }

    #[test]
    fn length_bands_clip_to_cap() {
        let mut state = RandomState::from_seed(4);
        let mut seen = HashMap::new();
        for _ in 0..100_000 {
            let (len, next) = draw_length(state, 64, &mut NoTrace);
            state = next;
            assert!(len <= 64);
            *seen.entry(len == 0).or_insert(0usize) += 1;
        }
        let empty = seen[&true] as f64 / 100_000.0;
        assert!((empty - 0.05).abs() < 0.005);
    }

    #[test]
    fn bytes_in_range_and_uniform() {
        let mut counts = [0usize; 256];
        let mut total = 0usize;
        let mut state = RandomState::from_seed(6);
        let mut saw_empty = false;
        while total < 1_000_000 {
            let (b, next) = enum_bytes(state);
            state = next;
            saw_empty |= b.is_empty();
            for x in &b {
                counts[*x as usize] += 1;
            }
            total += b.len();
        }
        assert!(saw_empty);
        for c in counts {
            assert!((c as f64 / total as f64 - 1.0 / 256.0).abs() <= 0.002);
        }
    }

    #[test]
    fn bool_and_none() {
        let s = RandomState::from_seed(77);
        assert_eq!(enum_bool(s), enum_bool(s));
        assert_eq!(enum_none(s), ((), s));
        let mut state = s;
        let mut trues = 0;
        for _ in 0..1_000_000 {
            let (b, next) = enum_bool(state);
            trues += usize::from(b);
            state = next;
        }
        assert!((0.495..=0.505).contains(&(trues as f64 / 1e6)));
    }
}
