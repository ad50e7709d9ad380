//! Binary reflected Gray code and the static Gray-Hilbert curve.
//!
//! Bit position `i` of every n-bit word (Gray words, orthant addresses,
//! masks) refers to coordinate `i`; coordinate 0 is the least significant
//! bit. A [`TransformState`] maps a Gray word onto the orthants of one
//! hypercube: bit `j` of the word is moved to coordinate `perm[j]` and the
//! result is XORed with `mask`. The most significant word bit therefore
//! selects the coordinate split at the first level of the block, and the
//! mask is the corner through which the curve enters the cube.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported dimension; one machine word holds a full level.
pub const MAX_DIM: usize = 63;

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::Dimension { n });
    }
    Ok(())
}

#[inline]
fn low_mask(n: usize) -> u64 {
    (1u64 << n) - 1
}

/// An n-bit word of the binary reflected Gray code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GrayWord {
    bits: u64,
    n: usize,
}

impl GrayWord {
    pub fn new(bits: u64, n: usize) -> Result<Self> {
        check_dim(n)?;
        if bits > low_mask(n) {
            return Err(Error::WordOverflow { value: bits, n });
        }
        Ok(GrayWord { bits, n })
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn dim(self) -> usize {
        self.n
    }
}

#[inline]
pub(crate) fn gray(x: u64) -> u64 {
    x ^ (x >> 1)
}

#[inline]
pub(crate) fn gray_inverse(mut g: u64) -> u64 {
    g ^= g >> 1;
    g ^= g >> 2;
    g ^= g >> 4;
    g ^= g >> 8;
    g ^= g >> 16;
    g ^= g >> 32;
    g
}

/// `x ↦ x XOR (x >> 1)` on n-bit words.
pub fn gray_encode(x: u64, n: usize) -> Result<GrayWord> {
    check_dim(n)?;
    if x > low_mask(n) {
        return Err(Error::WordOverflow { value: x, n });
    }
    Ok(GrayWord { bits: gray(x), n })
}

/// Inverse of [`gray_encode`]: the rank of `g` in the Gray traversal.
pub fn gray_decode(g: GrayWord) -> u64 {
    gray_inverse(g.bits)
}

/// Re-orientation rule applied at every entry into a child hypercube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Bubble,
    Ring,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Bubble, Scheme::Ring];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Bubble => "bubble",
            Scheme::Ring => "ring",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bubble" => Ok(Scheme::Bubble),
            "ring" => Ok(Scheme::Ring),
            other => Err(Error::InvalidParameter(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Level-to-coordinate assignment for a block whose first level splits
/// coordinate `d`. Entry `i` is the coordinate carried by word bit `i`.
///
/// Bubble moves `d` to the top and shifts the coordinates above it down by
/// one; ring rotates every coordinate by `d + 1`. Both send bit `n - 1` to
/// `d`.
pub fn scheme_permutation(scheme: Scheme, d: usize, n: usize) -> Result<Vec<usize>> {
    check_dim(n)?;
    if d >= n {
        return Err(Error::CoordinateIndex { d, n });
    }
    Ok(permutation_unchecked(scheme, d, n))
}

fn permutation_unchecked(scheme: Scheme, d: usize, n: usize) -> Vec<usize> {
    match scheme {
        Scheme::Bubble => (0..n)
            .map(|i| match i {
                i if i == n - 1 => d,
                i if i < d => i,
                i => i + 1,
            })
            .collect(),
        Scheme::Ring => (0..n).map(|i| (i + d + 1) % n).collect(),
    }
}

/// Affine Gray-code transform governing the traversal of one hypercube.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransformState {
    perm: Vec<usize>,
    mask: u64,
}

impl TransformState {
    pub fn new(perm: Vec<usize>, mask: u64) -> Result<Self> {
        let n = perm.len();
        check_dim(n)?;
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Malformed {
                    what: "permutation",
                    detail: format!("{perm:?} is not a bijection on 0..{n}"),
                });
            }
        }
        if mask > low_mask(n) {
            return Err(Error::WordOverflow { value: mask, n });
        }
        Ok(TransformState { perm, mask })
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(TransformState {
            perm: (0..n).collect(),
            mask: 0,
        })
    }

    /// State of the unit cube. Both schemes give the identity here because
    /// the root block leads with coordinate `n - 1`.
    pub fn root(n: usize, scheme: Scheme) -> Result<Self> {
        Self::for_block(scheme, n - 1, 0, n)
    }

    pub(crate) fn for_block(scheme: Scheme, lead: usize, mask: u64, n: usize) -> Result<Self> {
        Ok(TransformState {
            perm: scheme_permutation(scheme, lead, n)?,
            mask,
        })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    /// Coordinate split by the first level of this block.
    pub fn lead_axis(&self) -> usize {
        self.perm[self.dim() - 1]
    }

    /// Orthant address of the Gray word `word`.
    pub fn apply(&self, word: u64) -> u64 {
        let mut out = self.mask;
        for (j, &axis) in self.perm.iter().enumerate() {
            out ^= ((word >> j) & 1) << axis;
        }
        out
    }

    /// Gray word of the orthant address `orthant`.
    pub fn unapply(&self, orthant: u64) -> u64 {
        let w = orthant ^ self.mask;
        let mut out = 0;
        for (j, &axis) in self.perm.iter().enumerate() {
            out |= ((w >> axis) & 1) << j;
        }
        out
    }

    /// Transform of the child visited at position `digit`.
    pub fn child(&self, digit: u64, scheme: Scheme) -> TransformState {
        let n = self.dim();
        let (entry, dir) = child_frame(digit, n);
        let lead = self.perm[dir];
        TransformState {
            perm: permutation_unchecked(scheme, lead, n),
            mask: self.apply(entry),
        }
    }
}

/// Entry corner and leading coordinate of child `g` in the untransformed
/// frame, where the parent is entered at corner 0 and left at corner
/// `1 << (n - 1)`.
///
/// Entries follow `gray(2 * ((g - 1) / 2))`. The exit of child `g` is the
/// corner facing child `g + 1` across their shared face, so the leading
/// coordinate is the single bit in which entry and exit differ.
pub(crate) fn child_frame(g: u64, n: usize) -> (u64, usize) {
    let entry = child_entry(g);
    let last = low_mask(n);
    let exit = if g == last {
        1u64 << (n - 1)
    } else {
        let j = g.trailing_ones();
        let side = (gray(g) >> j) & 1;
        (child_entry(g + 1) & !(1u64 << j)) | ((side ^ 1) << j)
    };
    let diff = entry ^ exit;
    debug_assert_eq!(diff.count_ones(), 1, "child {g} of dimension {n}");
    (entry, diff.trailing_zeros() as usize)
}

#[inline]
fn child_entry(g: u64) -> u64 {
    if g == 0 {
        0
    } else {
        gray((g - 1) & !1)
    }
}

/// `child_state` as a free function.
pub fn child_state(parent: &TransformState, digit: u64, scheme: Scheme) -> Result<TransformState> {
    let n = parent.dim();
    if digit > low_mask(n) {
        return Err(Error::WordOverflow { value: digit, n });
    }
    Ok(parent.child(digit, scheme))
}

/// A cell of the k-th dyadic subdivision of the unit n-cube, stored as one
/// k-bit integer per coordinate (most significant bit = coarsest split).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellAddress {
    coords: Vec<u64>,
    k: u32,
}

impl CellAddress {
    pub fn new(coords: Vec<u64>, k: u32) -> Result<Self> {
        check_dim(coords.len())?;
        if k > 64 {
            return Err(Error::InvalidParameter(format!("k = {k} exceeds 64")));
        }
        if k < 64 {
            if let Some(&c) = coords.iter().find(|&&c| c >> k != 0) {
                return Err(Error::Malformed {
                    what: "cell address",
                    detail: format!("coordinate {c} does not fit in {k} bits"),
                });
            }
        }
        Ok(CellAddress { coords, k })
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn iterations(&self) -> u32 {
        self.k
    }

    /// Orthant bits chosen at subdivision `level` (0 = coarsest).
    fn orthant(&self, level: u32) -> u64 {
        let shift = self.k - 1 - level;
        self.coords
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &c)| acc | (((c >> shift) & 1) << i))
    }
}

/// Position on the k-th iteration curve: one Gray rank per subdivision.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurveKey {
    digits: Vec<u64>,
    n: usize,
}

impl CurveKey {
    pub fn new(digits: Vec<u64>, n: usize) -> Result<Self> {
        check_dim(n)?;
        if let Some(&d) = digits.iter().find(|&&d| d > low_mask(n)) {
            return Err(Error::WordOverflow { value: d, n });
        }
        Ok(CurveKey { digits, n })
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn iterations(&self) -> u32 {
        self.digits.len() as u32
    }

    /// Key as a single integer when it fits in 128 bits.
    pub fn to_u128(&self) -> Option<u128> {
        if self.n * self.digits.len() > 128 {
            return None;
        }
        Some(
            self.digits
                .iter()
                .fold(0u128, |acc, &d| (acc << self.n) | u128::from(d)),
        )
    }
}

pub fn encode_key(cell: &CellAddress, scheme: Scheme) -> CurveKey {
    let n = cell.dim();
    let mut state = TransformState::root(n, scheme).expect("cell dimension already checked");
    let mut digits = Vec::with_capacity(cell.k as usize);
    for level in 0..cell.k {
        let g = gray_inverse(state.unapply(cell.orthant(level)));
        digits.push(g);
        state = state.child(g, scheme);
    }
    CurveKey { digits, n }
}

pub fn decode_key(key: &CurveKey, scheme: Scheme) -> CellAddress {
    let n = key.n;
    let k = key.digits.len() as u32;
    let mut state = TransformState::root(n, scheme).expect("key dimension already checked");
    let mut coords = vec![0u64; n];
    for &g in &key.digits {
        let orthant = state.apply(gray(g));
        for (i, c) in coords.iter_mut().enumerate() {
            *c = (*c << 1) | ((orthant >> i) & 1);
        }
        state = state.child(g, scheme);
    }
    CellAddress { coords, k }
}

/// First `k` binary digits of every coordinate.
pub fn point_to_cell(point: &[f64], k: u32) -> Result<CellAddress> {
    check_dim(point.len())?;
    if k > 64 {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds 64")));
    }
    let scale = 2f64.powi(k as i32);
    let coords = point
        .iter()
        .enumerate()
        .map(|(axis, &x)| {
            if (0.0..1.0).contains(&x) {
                Ok((x * scale) as u64)
            } else {
                Err(Error::CoordinateRange { axis, value: x })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CellAddress { coords, k })
}
