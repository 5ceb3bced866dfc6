//! Counting solutions of `t1 .. tw [a1,b1] .. [ah,bh] = 1` in `S_d`, with
//! every `tj` a transposition, by the character sum
//!
//! `N = |C|^w |G|^(2h-1) sum_chi chi(t)^w / chi(1)^(w+2h-2)`.
//!
//! Irreducible characters are indexed by partitions of `d`. Their degree
//! comes from the hook length formula and their value on a transposition
//! from the content sum: `chi(t) / chi(1) = 2 content / (d (d-1))`.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num};

use crate::error::{Error, Result};
use crate::perm::MAX_DEGREE;

/// Exact rational scalar used for counting.
pub type ExactCount = Ratio<BigInt>;

/// Floating point scalar, for quick magnitude estimates.
pub type ApproxCount = f64;

/// Partitions of `n` in reverse lexicographic order.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=n.min(max)).rev() {
            prefix.push(part);
            go(n - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Character degree and value on a transposition, for one partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterRow {
    pub shape: Vec<usize>,
    pub degree: BigInt,
    pub on_transposition: BigInt,
}

pub fn character_row(shape: &[usize]) -> CharacterRow {
    let n: usize = shape.iter().sum();
    let conjugate: Vec<usize> = (0..shape.first().copied().unwrap_or(0))
        .map(|c| shape.iter().filter(|&&r| r > c).count())
        .collect();
    let mut hooks = BigInt::from(1);
    let mut content = 0i64;
    for (r, &len) in shape.iter().enumerate() {
        for c in 0..len {
            hooks *= BigInt::from((len - c - 1) + (conjugate[c] - r - 1) + 1);
            content += c as i64 - r as i64;
        }
    }
    let fact: BigInt = (1..=n).map(BigInt::from).product();
    let degree = fact / hooks;
    let on_transposition = if n < 2 {
        BigInt::from(0)
    } else {
        &degree * BigInt::from(2 * content) / BigInt::from(n * (n - 1))
    };
    CharacterRow {
        shape: shape.to_vec(),
        degree,
        on_transposition,
    }
}

pub fn character_table(d: usize) -> Vec<CharacterRow> {
    partitions(d).iter().map(|p| character_row(p)).collect()
}

/// Converts a big integer into any scalar by Horner evaluation over 32-bit
/// digits, which is exact for rational scalars.
fn to_scalar<T: Num + Clone + FromPrimitive>(x: &BigInt) -> T {
    let (sign, digits) = x.to_u32_digits();
    let base = T::from_u64(1 << 32).expect("scalar holds 2^32");
    let mut acc = T::zero();
    for d in digits.iter().rev() {
        acc = acc * base.clone() + T::from_u32(*d).expect("scalar holds u32");
    }
    if sign == Sign::Minus {
        T::zero() - acc
    } else {
        acc
    }
}

fn pow<T: Num + Clone>(x: T, e: i64) -> T {
    let p = num_traits::pow(x, e.unsigned_abs() as usize);
    if e < 0 {
        T::one() / p
    } else {
        p
    }
}

/// The character sum evaluated in the scalar type `T`.
pub fn frobenius_count<T: Num + Clone + FromPrimitive>(d: usize, h: usize, w: usize) -> Result<T> {
    if d == 0 || d > MAX_DEGREE {
        return Err(Error::Unsupported(format!("character table for d = {d} not available")));
    }
    let class_size = T::from_usize(d * (d - 1) / 2).expect("scalar holds class size");
    let group_order: T = to_scalar(&(1..=d).map(BigInt::from).product::<BigInt>());
    let exponent = w as i64 + 2 * h as i64 - 2;
    let mut sum = T::zero();
    for row in character_table(d) {
        let value: T = to_scalar(&row.on_transposition);
        let degree: T = to_scalar(&row.degree);
        sum = sum + pow(value, w as i64) * pow(degree, -exponent);
    }
    Ok(pow(class_size, w as i64) * pow(group_order, 2 * h as i64 - 1) * sum)
}

/// Exact number of valid systems with parameters `(d, h, w)`.
pub fn count_systems(d: usize, h: usize, w: usize) -> Result<BigUint> {
    let n: ExactCount = frobenius_count(d, h, w)?;
    if !n.is_integer() {
        return Err(Error::Unsupported(format!("character sum {n} is not an integer")));
    }
    n.to_integer()
        .to_biguint()
        .ok_or_else(|| Error::Unsupported(format!("character sum {n} is negative")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (1..=10).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
    }

    #[test]
    fn degrees_square_sum_to_group_order() {
        for d in 1..=8 {
            let table = character_table(d);
            let sum: BigInt = table.iter().map(|r| &r.degree * &r.degree).sum();
            let fact: BigInt = (1..=d).map(BigInt::from).product();
            assert_eq!(sum, fact);
        }
    }

    #[test]
    fn s3_table() {
        let table = character_table(3);
        let vals: Vec<(i64, i64)> = table
            .iter()
            .map(|r| {
                (
                    r.degree.to_string().parse().unwrap(),
                    r.on_transposition.to_string().parse().unwrap(),
                )
            })
            .collect();
        assert_eq!(vals, vec![(1, 1), (2, 0), (1, -1)]);
    }

    #[test]
    fn stated_counts() {
        assert_eq!(count_systems(3, 0, 4).unwrap(), BigUint::from(27u32));
        assert_eq!(count_systems(2, 1, 4).unwrap(), BigUint::from(4u32));
        assert_eq!(count_systems(2, 0, 2).unwrap(), BigUint::from(1u32));
        assert_eq!(count_systems(2, 0, 3).unwrap(), BigUint::from(0u32));
        assert_eq!(count_systems(1, 3, 0).unwrap(), BigUint::from(1u32));
    }

    #[test]
    fn float_scalar_agrees_in_magnitude() {
        let exact = count_systems(3, 1, 6).unwrap();
        let approx: ApproxCount = frobenius_count(3, 1, 6).unwrap();
        assert!((approx - exact.to_string().parse::<f64>().unwrap()).abs() < 1e-6 * approx);
    }
}
