//! Rational encoding of matrices and complex terms into exact dyadic numbers.
//!
//! No floating point is used anywhere. A [`Dyadic`] is the bit string
//! `0.b1 b2 … bm` in base two; a [`Ratio`] is a reduced fraction used where
//! quotients of dyadics are needed.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::boolmat::{BoolArray, BoolMatrix, NodeUniverse};
use crate::error::{MggError, Result};
use crate::mcl::{cmul, ComplexTerm};
use crate::par::{map_range, Exec};

/// Exact dyadic number in `[0, 1)`, stored as its binary expansion after
/// the point with trailing zeros removed.
///
/// Because the form is canonical, the derived ordering on the bit vector is
/// the numeric ordering.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Dyadic {
    bits: Vec<bool>,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { bits: Vec::new() }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut bits: Vec<bool> = bits.into_iter().collect();
        while bits.last() == Some(&false) {
            bits.pop();
        }
        Dyadic { bits }
    }

    /// Parses `0.0110b`, `0.011` or `0`.
    pub fn parse_binary(text: &str) -> Option<Self> {
        let t = text.trim().trim_end_matches('b');
        let frac = match t.split_once('.') {
            Some(("0", frac)) => frac,
            None if t == "0" => "",
            _ => return None,
        };
        let bits = frac
            .chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Self::from_bits(bits))
    }

    /// Bits after the binary point, most significant first.
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Bit `k`, 1-based; zero beyond the stored length.
    pub fn bit(&self, k: usize) -> bool {
        k >= 1 && self.bits.get(k - 1).copied().unwrap_or(false)
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_empty()
    }

    fn zip(&self, other: &Dyadic, f: impl Fn(bool, bool) -> bool) -> Dyadic {
        let len = self.bits.len().max(other.bits.len());
        Self::from_bits((1..=len).map(|k| f(self.bit(k), other.bit(k))))
    }

    pub fn xor(&self, other: &Dyadic) -> Dyadic {
        self.zip(other, |a, b| a ^ b)
    }

    pub fn and(&self, other: &Dyadic) -> Dyadic {
        self.zip(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Dyadic) -> Dyadic {
        self.zip(other, |a, b| a | b)
    }

    pub fn to_ratio(&self) -> Ratio {
        let mut num = BigUint::zero();
        for &b in &self.bits {
            num <<= 1u32;
            if b {
                num += 1u32;
            }
        }
        let den = BigUint::one() << self.bits.len();
        // the last stored bit is 1, so the numerator is odd: already reduced
        Ratio { num, den }
    }

    /// `0.011b`; zero prints as `0.0b`.
    pub fn to_binary_string(&self) -> String {
        if self.bits.is_empty() {
            return "0.0b".to_string();
        }
        let digits: String = self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        format!("0.{digits}b")
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.to_binary_string(), self.to_ratio())
    }
}

/// Non-negative reduced fraction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ratio {
    num: BigUint,
    den: BigUint,
}

impl Ratio {
    pub fn new(num: BigUint, den: BigUint) -> Result<Self> {
        if den.is_zero() {
            return Err(MggError::DivisionByZero);
        }
        let g = num.gcd(&den);
        if g.is_zero() {
            return Ok(Ratio::zero());
        }
        Ok(Ratio {
            num: num / &g,
            den: den / g,
        })
    }

    pub fn zero() -> Self {
        Ratio {
            num: BigUint::zero(),
            den: BigUint::one(),
        }
    }

    pub fn one() -> Self {
        Ratio {
            num: BigUint::one(),
            den: BigUint::one(),
        }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.num
    }

    pub fn denominator(&self) -> &BigUint {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn add(&self, other: &Ratio) -> Ratio {
        Ratio::new(
            &self.num * &other.den + &other.num * &self.den,
            &self.den * &other.den,
        )
        .expect("denominators are non-zero")
    }

    pub fn div(&self, other: &Ratio) -> Result<Ratio> {
        Ratio::new(&self.num * &other.den, &self.den * &other.num)
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// `re + i im`: certainty part as real, nihil part as imaginary.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicComplex {
    pub re: Dyadic,
    pub im: Dyadic,
}

impl fmt::Display for DyadicComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "re={}, im={}", self.re, self.im)
    }
}

fn column_major(m: &BoolMatrix) -> impl Iterator<Item = bool> + '_ {
    let n = m.dim();
    (0..n * n).map(move |k| m.get(k % n, k / n))
}

/// `ℓ(m)`: bit `k` is cell `((k-1) mod n, ⌊(k-1)/n⌋)` (0-based), i.e. the
/// matrix read column by column.
pub fn ell(m: &BoolMatrix) -> Dyadic {
    Dyadic::from_bits(column_major(m))
}

pub fn ell_complex(z: &ComplexTerm) -> DyadicComplex {
    DyadicComplex {
        re: ell(&z.cert_edges),
        im: ell(&z.nihil_edges),
    }
}

/// `∥z∥ = ℓ(a ⊕ b)`.
pub fn norm(z: &ComplexTerm) -> Dyadic {
    ell(&(&z.cert_edges ^ &z.nihil_edges))
}

/// `∥zy∥ / ∥y∥`.
pub fn conditional_norm(z: &ComplexTerm, y: &ComplexTerm) -> Result<Ratio> {
    let denom = norm(y);
    if denom.is_zero() {
        return Err(MggError::DivisionByZero);
    }
    let num = norm(&cmul(z, y)?);
    num.to_ratio().div(&denom.to_ratio())
}

/// Distance between terms: the bits of `a1 ⊕ a2` followed by the bits of
/// `b1 ⊕ b2`, each read column by column.
///
/// This is the xor metric on the concatenated encoding, so `d = 0` exactly
/// when the terms coincide.
pub fn distance(z1: &ComplexTerm, z2: &ComplexTerm) -> Result<Dyadic> {
    if !z1.cert_edges.shares_universe(&z2.cert_edges) {
        return Err(MggError::UniverseMismatch);
    }
    let dc = &z1.cert_edges ^ &z2.cert_edges;
    let dn = &z1.nihil_edges ^ &z2.nihil_edges;
    Ok(Dyadic::from_bits(column_major(&dc).chain(column_major(&dn))))
}

/// `∥w1∥ ⊕ ∥w2∥` with `w1 = a1 ∨ i a2`, `w2 = b1 ∨ i b2`, both norms aligned
/// at the binary point.
///
/// Certainty and nihil differences land on the same bit, so distinct terms
/// can be at distance zero. Kept for comparison with [`distance`].
pub fn distance_folded(z1: &ComplexTerm, z2: &ComplexTerm) -> Result<Dyadic> {
    if !z1.cert_edges.shares_universe(&z2.cert_edges) {
        return Err(MggError::UniverseMismatch);
    }
    let w1 = ell(&(&z1.cert_edges ^ &z2.cert_edges));
    let w2 = ell(&(&z1.nihil_edges ^ &z2.nihil_edges));
    Ok(w1.xor(&w2))
}

/// Square monochrome raster, packed one bit per pixel.
#[derive(Clone, PartialEq, Eq)]
pub struct Bitmap {
    width: usize,
    height: usize,
    stride: usize,
    words: Vec<u64>,
}

impl Bitmap {
    pub fn new(width: usize, height: usize) -> Self {
        let stride = width.div_ceil(64);
        Bitmap {
            width,
            height,
            stride,
            words: vec![0; stride * height],
        }
    }

    /// Bitmap assembled from independently computed packed rows.
    pub fn from_rows(width: usize, rows: Vec<Vec<u64>>) -> Self {
        let stride = width.div_ceil(64);
        let height = rows.len();
        let mut words = Vec::with_capacity(stride * height);
        for row in rows {
            debug_assert_eq!(row.len(), stride);
            words.extend(row);
        }
        Bitmap {
            width,
            height,
            stride,
            words,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.words[y * self.stride + x / 64] >> (x % 64) & 1 == 1
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        let w = &mut self.words[y * self.stride + x / 64];
        if value {
            *w |= 1 << (x % 64);
        } else {
            *w &= !(1 << (x % 64));
        }
    }

    pub fn count_set(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Plain portable bitmap: `P1 W H` header, then one line of `0`/`1` per row.
    pub fn to_pbm(&self) -> String {
        let mut out = String::with_capacity(16 + (self.width + 1) * self.height);
        out.push_str(&format!("P1 {} {}\n", self.width, self.height));
        for y in 0..self.height {
            for x in 0..self.width {
                out.push(if self.get(x, y) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for Bitmap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bitmap({}x{}, {} set)", self.width, self.height, self.count_set())
    }
}

/// Pixel `(x, y)` is set iff `x & y == 0`.
pub fn gasket_raster(bits: u32) -> Result<Bitmap> {
    gasket_raster_with(bits, Exec::default())
}

pub fn gasket_raster_with(bits: u32, exec: Exec) -> Result<Bitmap> {
    if !(1..=16).contains(&bits) {
        return Err(MggError::OutOfRange {
            what: "bits",
            value: bits as usize,
            min: 1,
            max: 16,
        });
    }
    let side = 1usize << bits;
    let stride = side.div_ceil(64);
    let rows = map_range(exec, 0..side, |y| {
        let mut row = vec![0u64; stride];
        for (wi, word) in row.iter_mut().enumerate() {
            let base = wi * 64;
            for b in 0..64.min(side - base) {
                if (base + b) & y == 0 {
                    *word |= 1 << b;
                }
            }
        }
        row
    });
    Ok(Bitmap::from_rows(side, rows))
}

/// Encoding of every term over `node_count` nodes whose cells are each
/// absent, certain or nihil.
pub fn h_points(node_count: usize) -> Result<Vec<DyadicComplex>> {
    if node_count > 3 {
        return Err(MggError::OutOfRange {
            what: "node_count",
            value: node_count,
            min: 0,
            max: 3,
        });
    }
    let u = NodeUniverse::numbered(node_count);
    let cells = node_count * node_count;
    let total = 3usize.pow(cells as u32);
    let points = (0..total)
        .map(|mut code| {
            let mut a = BoolMatrix::zeros(&u);
            let mut b = BoolMatrix::zeros(&u);
            for k in 0..cells {
                let (i, j) = (k / node_count, k % node_count);
                match code % 3 {
                    1 => a.set(i, j, true),
                    2 => b.set(i, j, true),
                    _ => {}
                }
                code /= 3;
            }
            DyadicComplex {
                re: ell(&a),
                im: ell(&b),
            }
        })
        .collect();
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolmat::contains;
    use crate::mcl::conj;
    use std::collections::HashSet;
    use std::sync::Arc;

    fn m(u: &Arc<NodeUniverse>, rows: &[&[u8]]) -> BoolMatrix {
        BoolMatrix::from_rows(u, rows).unwrap()
    }

    fn d(s: &str) -> Dyadic {
        Dyadic::parse_binary(s).unwrap()
    }

    fn all_terms(n: usize) -> Vec<ComplexTerm> {
        let u = NodeUniverse::numbered(n);
        let cells = n * n;
        (0..(1u32 << (2 * cells)))
            .map(|mask| {
                let mut a = BoolMatrix::zeros(&u);
                let mut b = BoolMatrix::zeros(&u);
                for k in 0..cells {
                    a.set(k / n, k % n, (mask >> k) & 1 == 1);
                    b.set(k / n, k % n, (mask >> (k + cells)) & 1 == 1);
                }
                ComplexTerm::from_matrices(a, b).unwrap()
            })
            .collect()
    }

    #[test]
    fn ell_examples() {
        let u = NodeUniverse::numbered(2);
        let x = ell(&m(&u, &[&[0, 1], &[1, 0]]));
        assert_eq!(x, d("0.0110b"));
        assert_eq!(x.to_ratio().to_string(), "3/8");
        assert_eq!(ell(&m(&u, &[&[1, 0], &[0, 0]])).to_ratio().to_string(), "1/2");
        assert!(ell(&BoolMatrix::zeros(&u)).is_zero());
    }

    #[test]
    fn ell_reads_columns_first() {
        let u = NodeUniverse::numbered(3);
        // cell (3,1) is the third bit, cell (1,2) the fourth
        let a = m(&u, &[&[0, 0, 0], &[0, 0, 0], &[1, 0, 0]]);
        assert_eq!(ell(&a), d("0.001b"));
        let b = m(&u, &[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]]);
        assert_eq!(ell(&b), d("0.0001b"));
    }

    #[test]
    fn ell_complex_example() {
        let u = NodeUniverse::numbered(2);
        let z = ComplexTerm::from_matrices(m(&u, &[&[0, 1], &[1, 0]]), m(&u, &[&[1, 0], &[0, 0]])).unwrap();
        let e = ell_complex(&z);
        assert_eq!(e.to_string(), "re=0.011b (3/8), im=0.1b (1/2)");
        let zero = ell_complex(&ComplexTerm::zero(&u));
        assert!(zero.re.is_zero() && zero.im.is_zero());
    }

    #[test]
    fn ell_is_injective_at_two_nodes() {
        let terms = all_terms(2);
        let images: HashSet<_> = terms.iter().map(ell_complex).collect();
        assert_eq!(images.len(), terms.len());
    }

    #[test]
    fn dyadic_ordering_is_numeric() {
        let values = ["0", "0.0001", "0.001", "0.0011", "0.01", "0.1", "0.10001", "0.11", "0.111"];
        for w in values.windows(2) {
            assert!(d(w[0]) < d(w[1]), "{} < {}", w[0], w[1]);
            assert!(d(w[0]).to_ratio() < d(w[1]).to_ratio());
        }
        assert_eq!(d("0.0110"), d("0.011"));
    }

    #[test]
    fn norm_examples() {
        let u = NodeUniverse::numbered(2);
        assert!(norm(&ComplexTerm::zero(&u)).is_zero());
        let a = m(&u, &[&[1, 1], &[0, 1]]);
        assert!(norm(&ComplexTerm::from_matrices(a.clone(), a).unwrap()).is_zero());
        for n in 1..=3 {
            let u = NodeUniverse::numbered(n);
            let r = norm(&ComplexTerm::nil(&u)).to_ratio();
            let den = BigUint::one() << (n * n);
            assert_eq!(r, Ratio::new(&den - 1u32, den).unwrap());
        }
    }

    #[test]
    fn conditional_norm_examples() {
        let terms = all_terms(2);
        let h: Vec<_> = terms.iter().filter(|z| z.is_disjoint()).collect();
        for z in &h {
            let nz = norm(z);
            if nz.is_zero() {
                assert_eq!(conditional_norm(z, z), Err(MggError::DivisionByZero));
                continue;
            }
            assert!(conditional_norm(z, z).unwrap().is_one());
            let zero = ComplexTerm::zero(z.universe());
            assert!(conditional_norm(&zero, z).unwrap().is_zero());
        }
        for z in &h {
            for y in &h {
                if norm(y).is_zero() {
                    continue;
                }
                let support_y = &y.cert_edges | &y.nihil_edges;
                let support_z = &z.cert_edges | &z.nihil_edges;
                let sub = contains(&support_y, &support_z).unwrap();
                assert_eq!(conditional_norm(z, y).unwrap().is_one(), sub);
            }
        }
    }

    #[test]
    fn conditional_norm_is_not_always_dyadic() {
        let u = NodeUniverse::numbered(2);
        let y = ComplexTerm::from_matrices(m(&u, &[&[1, 1], &[0, 0]]), BoolMatrix::zeros(&u)).unwrap();
        let z = ComplexTerm::from_matrices(m(&u, &[&[0, 1], &[0, 0]]), BoolMatrix::zeros(&u)).unwrap();
        // ℓ(y) = 0.101b = 5/8, ℓ(zy) = 0.001b = 1/8
        assert_eq!(conditional_norm(&z, &y).unwrap().to_string(), "1/5");
    }

    #[test]
    fn norm_properties_exhaustive() {
        for n in 1..=2 {
            let terms = all_terms(n);
            let h: Vec<_> = terms.iter().filter(|z| z.is_disjoint()).collect();
            for z in &h {
                assert_eq!(norm(z).is_zero(), z.is_zero());
            }
            for y in &h {
                for z in &h {
                    assert_eq!(norm(&cmul(y, z).unwrap()), norm(y).and(&norm(z)));
                }
            }
            for z1 in &terms {
                assert_eq!(norm(&conj(z1)), norm(z1));
                for z2 in &terms {
                    let sum = crate::mcl::cadd(z1, z2).unwrap();
                    assert!(norm(&sum) <= norm(z1).or(&norm(z2)));
                }
            }
        }
    }

    #[test]
    fn distance_examples() {
        let u = NodeUniverse::numbered(2);
        let z1 = ComplexTerm::from_matrices(m(&u, &[&[1, 0], &[0, 0]]), BoolMatrix::zeros(&u)).unwrap();
        let z2 = ComplexTerm::from_matrices(m(&u, &[&[0, 0], &[0, 1]]), BoolMatrix::zeros(&u)).unwrap();
        let dist = distance(&z1, &z2).unwrap();
        assert_eq!(dist, d("0.1001"));
        assert_eq!(dist.to_ratio().to_string(), "9/16");
        assert!(distance(&z1, &z1).unwrap().is_zero());
        assert_eq!(distance_folded(&z1, &z2).unwrap(), dist);
    }

    #[test]
    fn distance_is_a_metric_at_one_node() {
        let terms = all_terms(1);
        for x in &terms {
            for y in &terms {
                let dxy = distance(x, y).unwrap();
                assert_eq!(dxy.is_zero(), x == y);
                assert_eq!(dxy, distance(y, x).unwrap());
                for z in &terms {
                    let lhs = distance(x, z).unwrap().to_ratio();
                    let rhs = dxy.to_ratio().add(&distance(y, z).unwrap().to_ratio());
                    assert!(lhs <= rhs);
                }
            }
        }
    }

    #[test]
    fn folded_distance_confuses_certainty_and_nihil() {
        let u = NodeUniverse::numbered(1);
        let one = BoolMatrix::ones(&u);
        let zero = BoolMatrix::zeros(&u);
        let c = ComplexTerm::from_matrices(one.clone(), zero.clone()).unwrap();
        let n = ComplexTerm::from_matrices(zero, one).unwrap();
        assert!(distance_folded(&c, &n).unwrap().is_zero());
        assert!(!distance(&c, &n).unwrap().is_zero());
    }

    #[test]
    fn gasket_small() {
        let g = gasket_raster(1).unwrap();
        assert!(g.get(0, 0) && g.get(0, 1) && g.get(1, 0));
        assert!(!g.get(1, 1));
        assert_eq!(g.to_pbm(), "P1 2 2\n11\n10\n");
        for bits in 1..=7 {
            let g = gasket_raster(bits).unwrap();
            for k in 0..g.width() {
                assert!(g.get(k, 0) && g.get(0, k));
            }
            assert_eq!(g.count_set(), 3usize.pow(bits));
        }
        assert!(gasket_raster(0).is_err());
        assert!(gasket_raster(17).is_err());
    }

    #[test]
    fn gasket_strategies_agree() {
        for bits in [3, 7, 9] {
            assert_eq!(
                gasket_raster_with(bits, Exec::Sequential).unwrap(),
                gasket_raster_with(bits, Exec::Parallel).unwrap()
            );
        }
    }

    #[test]
    fn h_points_examples() {
        let p1 = h_points(1).unwrap();
        let expected: HashSet<_> = [("0", "0"), ("0.1", "0"), ("0", "0.1")]
            .iter()
            .map(|(r, i)| DyadicComplex { re: d(r), im: d(i) })
            .collect();
        assert_eq!(p1.iter().cloned().collect::<HashSet<_>>(), expected);
        for n in 0..=2 {
            let pts = h_points(n).unwrap();
            assert_eq!(pts.len(), 3usize.pow((n * n) as u32));
            let distinct: HashSet<_> = pts.iter().collect();
            assert_eq!(distinct.len(), pts.len());
            assert!(pts.iter().all(|p| p.re.and(&p.im).is_zero()));
        }
        assert!(h_points(4).is_err());
    }
}
