//! Property 𝒟 and the zero patterns it forces.
//!
//! A kernel `h` has property 𝒟 when every 2×2 minor on rows `{x, w}` and
//! columns `{y, z}`, with `x, y, z, w` pairwise distinct,
//!
//! ```text
//! h(x,y)·h(w,z) − h(x,z)·h(w,y)
//! ```
//!
//! is nonzero. Swapping the two rows or the two columns only flips the sign,
//! so it is enough to scan `x < w` and `y < z`.

use serde::Serialize;
use thiserror::Error;

use crate::kernel::Kernel;
use crate::scalar::Scalar;

/// A vanishing minor: rows `{x, w}`, columns `{y, z}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDWitness {
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub w: usize,
    pub determinant: Scalar,
}

impl ClassDWitness {
    pub fn quadruple(&self) -> [usize; 4] {
        [self.x, self.y, self.z, self.w]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDReport {
    pub holds: bool,
    /// Fewer than four points: the condition quantifies over nothing.
    pub vacuous: bool,
    pub witness: Option<ClassDWitness>,
}

pub(crate) fn disjoint_minor(h: &Kernel, x: usize, y: usize, z: usize, w: usize) -> Scalar {
    &(h.entry(x, y) * h.entry(w, z)) - &(h.entry(x, z) * h.entry(w, y))
}

/// Scans quadruples `(x, y, z, w)` lexicographically (with `x < w`, `y < z`)
/// and reports the first vanishing minor.
pub fn check_class_d(h: &Kernel) -> ClassDReport {
    let n = h.n();
    if n < 4 {
        return ClassDReport {
            holds: true,
            vacuous: true,
            witness: None,
        };
    }
    for x in 0..n {
        for y in (0..n).filter(|&y| y != x) {
            for z in (y + 1..n).filter(|&z| z != x) {
                for w in (x + 1..n).filter(|&w| w != y && w != z) {
                    let d = disjoint_minor(h, x, y, z, w);
                    if d.is_zero() {
                        return ClassDReport {
                            holds: false,
                            vacuous: false,
                            witness: Some(ClassDWitness { x, y, z, w, determinant: d }),
                        };
                    }
                }
            }
        }
    }
    ClassDReport {
        holds: true,
        vacuous: false,
        witness: None,
    }
}

/// `h(x, y) = 0` but one of `h(x, z)`, `h(z, y)` also vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ZeroPatternViolation {
    pub x: usize,
    pub y: usize,
    pub z: usize,
    /// `true` when `h(x, z) = 0`, `false` when only `h(z, y) = 0`.
    pub row_side: bool,
}

/// For every off-diagonal zero `h(x, y)`, checks `h(x, z) ≠ 0` and `h(z, y) ≠ 0`
/// for all other points `z`. Property 𝒟 (with at least four points) forces this.
pub fn zero_pattern_validate(h: &Kernel) -> Vec<ZeroPatternViolation> {
    let n = h.n();
    let mut out = Vec::new();
    for x in 0..n {
        for y in (0..n).filter(|&y| y != x && h.is_zero_at(x, y)) {
            for z in (0..n).filter(|&z| z != x && z != y) {
                let row_side = h.is_zero_at(x, z);
                if row_side || h.is_zero_at(z, y) {
                    out.push(ZeroPatternViolation { x, y, z, row_side });
                }
            }
        }
    }
    out
}

/// The admissible zero/nonzero patterns of the four entries
/// `K(x,y), K(y,x), Q(x,y), Q(y,x)` of a determinantally equivalent pair with property 𝒟.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeTag {
    /// (i) all four vanish.
    AllZero,
    /// (ii) none vanish.
    AllNonzero,
    /// (iii) `K(x,y) = 0 = Q(x,y)`, reverse entries nonzero.
    Case1ZeroForward,
    /// (iv) `K(y,x) = 0 = Q(y,x)`, forward entries nonzero.
    Case1ZeroBackward,
    /// (v) `K(x,y) = 0 = Q(y,x)`, `K(y,x)` and `Q(x,y)` nonzero.
    Case2Zero,
    /// (vi) `K(y,x) = 0 = Q(x,y)`, `K(x,y)` and `Q(y,x)` nonzero.
    Case2ZeroReversed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EdgePattern {
    pub tag: EdgeTag,
    pub x: usize,
    pub y: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("pair ({x}, {y}) has zero pattern K(x,y)={kxy}, K(y,x)={kyx}, Q(x,y)={qxy}, Q(y,x)={qyx} (1 = nonzero); no canonical transform can relate the kernels")]
pub struct ProblematicPair {
    pub x: usize,
    pub y: usize,
    pub kxy: u8,
    pub kyx: u8,
    pub qxy: u8,
    pub qyx: u8,
}

/// Classifies the pair `(x, y)`. Patterns outside the six admissible ones are
/// reported as [`ProblematicPair`].
pub fn edge_pattern(k: &Kernel, q: &Kernel, x: usize, y: usize) -> Result<EdgePattern, ProblematicPair> {
    assert_ne!(x, y, "edge_pattern needs distinct points");
    let nz = |h: &Kernel, a, b| !h.is_zero_at(a, b);
    let key = (nz(k, x, y), nz(k, y, x), nz(q, x, y), nz(q, y, x));
    let tag = match key {
        (false, false, false, false) => EdgeTag::AllZero,
        (true, true, true, true) => EdgeTag::AllNonzero,
        (false, true, false, true) => EdgeTag::Case1ZeroForward,
        (true, false, true, false) => EdgeTag::Case1ZeroBackward,
        (false, true, true, false) => EdgeTag::Case2Zero,
        (true, false, false, true) => EdgeTag::Case2ZeroReversed,
        (a, b, c, d) => {
            return Err(ProblematicPair {
                x,
                y,
                kxy: a as u8,
                kyx: b as u8,
                qxy: c as u8,
                qyx: d as u8,
            })
        }
    };
    Ok(EdgePattern { tag, x, y })
}

/// Every unordered pair classified, or the first problematic one.
pub fn edge_patterns(k: &Kernel, q: &Kernel) -> Result<Vec<EdgePattern>, ProblematicPair> {
    let n = k.n();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for x in 0..n {
        for y in x + 1..n {
            out.push(edge_pattern(k, q, x, y)?);
        }
    }
    Ok(out)
}

/// Off-diagonal zero counts per row and per column.
pub fn off_diagonal_zero_counts(h: &Kernel) -> (Vec<usize>, Vec<usize>) {
    let n = h.n();
    let mut rows = vec![0; n];
    let mut cols = vec![0; n];
    for x in 0..n {
        for y in (0..n).filter(|&y| y != x && h.is_zero_at(x, y)) {
            rows[x] += 1;
            cols[y] += 1;
        }
    }
    (rows, cols)
}
