//! Block subgroups of `GL_n` cut out by an entry pattern and block determinants.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::GlError;
use crate::lattice::{format_q, parse_q, QMatrix, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Entry {
    Free,
    Zero,
    One,
}

impl Entry {
    fn symbol(self) -> char {
        match self {
            Entry::Free => 'f',
            Entry::Zero => 'z',
            Entry::One => 'o',
        }
    }
}

/// Required value of a block determinant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DetValue {
    /// Any unit (non-zero for rational points).
    Unit,
    Value(Q),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DetConstraint {
    pub block: Vec<usize>,
    pub value: DetValue,
}

/// `{g ∈ GL_n : g matches the pattern and the determinant constraints}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BlockGroupFile", into = "BlockGroupFile")]
pub struct BlockGroupSpec {
    name: String,
    n: usize,
    pattern: Vec<Vec<Entry>>,
    det: Vec<DetConstraint>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DetFile {
    block: Vec<usize>,
    value: String,
}

/// On-disk layout: `pattern` is one string of `f`/`z`/`o` per row.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct BlockGroupFile {
    name: String,
    n: usize,
    pattern: Vec<String>,
    #[serde(default)]
    det: Vec<DetFile>,
}

impl TryFrom<BlockGroupFile> for BlockGroupSpec {
    type Error = GlError;

    fn try_from(f: BlockGroupFile) -> Result<BlockGroupSpec, GlError> {
        let pattern = f
            .pattern
            .iter()
            .map(|row| {
                row.chars()
                    .filter(|c| !c.is_whitespace())
                    .map(|c| match c {
                        'f' => Ok(Entry::Free),
                        'z' => Ok(Entry::Zero),
                        'o' => Ok(Entry::One),
                        _ => Err(GlError::BadSpec(format!("unknown pattern symbol {c:?}"))),
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let det = f
            .det
            .into_iter()
            .map(|d| {
                let value = if d.value.trim() == "unit" {
                    DetValue::Unit
                } else {
                    DetValue::Value(
                        parse_q(&d.value).ok_or_else(|| GlError::BadSpec(format!("bad determinant {:?}", d.value)))?,
                    )
                };
                Ok(DetConstraint { block: d.block, value })
            })
            .collect::<Result<Vec<_>, GlError>>()?;
        BlockGroupSpec::new(f.name, f.n, pattern, det)
    }
}

impl From<BlockGroupSpec> for BlockGroupFile {
    fn from(s: BlockGroupSpec) -> BlockGroupFile {
        BlockGroupFile {
            name: s.name,
            n: s.n,
            pattern: s
                .pattern
                .iter()
                .map(|r| r.iter().map(|e| e.symbol()).collect())
                .collect(),
            det: s
                .det
                .into_iter()
                .map(|d| DetFile {
                    block: d.block,
                    value: match d.value {
                        DetValue::Unit => "unit".into(),
                        DetValue::Value(v) => format_q(&v),
                    },
                })
                .collect(),
        }
    }
}

impl fmt::Display for BlockGroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

const CLOSURE_SAMPLES: usize = 12;

impl BlockGroupSpec {
    /// Validates the data and checks closure under products and inverses on
    /// a seeded random sample.
    pub fn new(
        name: impl Into<String>,
        n: usize,
        pattern: Vec<Vec<Entry>>,
        det: Vec<DetConstraint>,
    ) -> Result<BlockGroupSpec, GlError> {
        let name = name.into();
        if n == 0 || pattern.len() != n || pattern.iter().any(|r| r.len() != n) {
            return Err(GlError::BadSpec(format!("pattern of {name} is not {n}x{n}")));
        }
        let mut det = det;
        for d in &mut det {
            d.block.sort_unstable();
            d.block.dedup();
            if d.block.is_empty() || d.block.iter().any(|&i| i >= n) {
                return Err(GlError::BadSpec(format!("bad determinant block {:?}", d.block)));
            }
        }
        let spec = BlockGroupSpec {
            name,
            n,
            pattern,
            det,
        };
        if !spec.contains(&QMatrix::identity(n)) {
            return Err(GlError::BadSpec(format!("{} does not contain the identity", spec.name)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x0b10c);
        let sample: Vec<QMatrix> = (0..CLOSURE_SAMPLES)
            .map(|_| spec.sample(&mut rng))
            .collect::<Result<_, _>>()?;
        for (i, a) in sample.iter().enumerate() {
            let inv = a.inverse().expect("samples are invertible");
            if !spec.contains(&inv) {
                return Err(GlError::BadSpec(format!("{} is not closed under inverses", spec.name)));
            }
            let b = &sample[(i + 1) % sample.len()];
            if !spec.contains(&(a * b)) {
                return Err(GlError::BadSpec(format!("{} is not closed under products", spec.name)));
            }
        }
        Ok(spec)
    }

    pub fn gl(n: usize) -> BlockGroupSpec {
        BlockGroupSpec::new(format!("GL{n}"), n, vec![vec![Entry::Free; n]; n], vec![]).expect("GL_n")
    }

    pub fn sl(n: usize) -> BlockGroupSpec {
        BlockGroupSpec::new(
            format!("SL{n}"),
            n,
            vec![vec![Entry::Free; n]; n],
            vec![DetConstraint {
                block: (0..n).collect(),
                value: DetValue::Value(Q::one()),
            }],
        )
        .expect("SL_n")
    }

    /// Upper-triangular matrices of determinant 1 in `SL₂`.
    pub fn borel_sl2() -> BlockGroupSpec {
        BlockGroupSpec::new(
            "B",
            2,
            vec![vec![Entry::Free, Entry::Free], vec![Entry::Zero, Entry::Free]],
            vec![DetConstraint {
                block: vec![0, 1],
                value: DetValue::Value(Q::one()),
            }],
        )
        .expect("Borel of SL2")
    }

    /// `GL₂ ⋉ V` embedded in `GL₃` as `[[A, v], [0, 1]]`.
    pub fn gl2_semidirect() -> BlockGroupSpec {
        use Entry::*;
        BlockGroupSpec::new(
            "GL2xV",
            3,
            vec![vec![Free, Free, Free], vec![Free, Free, Free], vec![Zero, Zero, One]],
            vec![],
        )
        .expect("GL2 x V")
    }

    /// Block-diagonal Levi `∏ GL_{nᵢ}` for consecutive blocks of the given sizes.
    pub fn block_levi(sizes: &[usize]) -> BlockGroupSpec {
        let n: usize = sizes.iter().sum();
        let block_of = block_index(sizes);
        let pattern = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if block_of[i] == block_of[j] { Entry::Free } else { Entry::Zero })
                    .collect()
            })
            .collect();
        BlockGroupSpec::new(format!("L{sizes:?}"), n, pattern, vec![]).expect("block Levi")
    }

    /// Block upper-triangular parabolic for consecutive blocks of the given sizes.
    pub fn block_parabolic(sizes: &[usize]) -> BlockGroupSpec {
        let n: usize = sizes.iter().sum();
        let block_of = block_index(sizes);
        let pattern = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if block_of[i] <= block_of[j] { Entry::Free } else { Entry::Zero })
                    .collect()
            })
            .collect();
        BlockGroupSpec::new(format!("P{sizes:?}"), n, pattern, vec![]).expect("block parabolic")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pattern(&self) -> &[Vec<Entry>] {
        &self.pattern
    }

    pub fn det_constraints(&self) -> &[DetConstraint] {
        &self.det
    }

    pub fn with_name(mut self, name: impl Into<String>) -> BlockGroupSpec {
        self.name = name.into();
        self
    }

    /// Every entry free and determinant constraints only on the whole matrix
    /// (`GL_n`, `SL_n` and the like).
    pub fn is_full_linear(&self) -> bool {
        self.pattern.iter().flatten().all(|e| *e == Entry::Free)
            && self.det.iter().all(|d| d.block.len() == self.n)
    }

    pub fn check_shape(&self, g: &QMatrix) -> Result<(), GlError> {
        if g.rows() != self.n || g.cols() != self.n {
            return Err(GlError::Shape {
                rows: g.rows(),
                cols: g.cols(),
                n: self.n,
            });
        }
        Ok(())
    }

    pub fn contains(&self, g: &QMatrix) -> bool {
        if g.rows() != self.n || g.cols() != self.n {
            return false;
        }
        for i in 0..self.n {
            for j in 0..self.n {
                let ok = match self.pattern[i][j] {
                    Entry::Free => true,
                    Entry::Zero => g[(i, j)].is_zero(),
                    Entry::One => g[(i, j)].is_one(),
                };
                if !ok {
                    return false;
                }
            }
        }
        if g.det().is_zero() {
            return false;
        }
        self.det.iter().all(|d| {
            let m = g.submatrix(&d.block, &d.block).det();
            match &d.value {
                DetValue::Unit => !m.is_zero(),
                DetValue::Value(v) => m == *v,
            }
        })
    }

    pub fn require(&self, g: &QMatrix) -> Result<(), GlError> {
        self.check_shape(g)?;
        if !self.contains(g) {
            return Err(GlError::NotInGroup(self.name.clone()));
        }
        Ok(())
    }

    /// A random element with small integer free entries, adjusted to meet
    /// the determinant values.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<QMatrix, GlError> {
        for attempt in 0..400 {
            let r = 2 + attempt / 40;
            let mut g = QMatrix::zeros(self.n, self.n);
            for i in 0..self.n {
                for j in 0..self.n {
                    g[(i, j)] = match self.pattern[i][j] {
                        Entry::Free => Q::from_integer(rng.gen_range(-r..=r).into()),
                        Entry::Zero => Q::zero(),
                        Entry::One => Q::one(),
                    };
                }
            }
            for d in &self.det {
                if let DetValue::Value(v) = &d.value {
                    fix_block_det(&mut g, &self.pattern, &d.block, v, rng);
                }
            }
            if self.contains(&g) {
                return Ok(g);
            }
        }
        Err(GlError::BadSpec(format!("could not sample an element of {}", self.name)))
    }

    /// `μ ∈ Y(D_H) ⊗ ℚ` for the diagonal torus `D_H`: zero where the diagonal
    /// entry is pinned to 1, and summing to zero over each determinant block
    /// with a prescribed value.
    pub fn torus_weights_ok(&self, mu: &[Q]) -> bool {
        mu.len() == self.n
            && (0..self.n).all(|i| self.pattern[i][i] != Entry::One || mu[i].is_zero())
            && self.det.iter().all(|d| match d.value {
                DetValue::Unit => true,
                DetValue::Value(_) => d.block.iter().fold(Q::zero(), |s, &i| s + &mu[i]).is_zero(),
            })
    }

    /// Pattern-level test of `self ⊆ other`.
    pub fn is_subgroup_of(&self, other: &BlockGroupSpec) -> bool {
        if self.n != other.n {
            return false;
        }
        for i in 0..self.n {
            for j in 0..self.n {
                let ok = match other.pattern[i][j] {
                    Entry::Free => true,
                    e => self.pattern[i][j] == e,
                };
                if !ok {
                    return false;
                }
            }
        }
        other.det.iter().all(|d| {
            self.det.contains(d) || (d.value == DetValue::Unit && d.block.len() == self.n)
        })
    }

    /// Checks that `g(a) = S·diag(a^{kⱼ})·S⁻¹` lies in the group for every
    /// `a`, where `k` is the primitive integer multiple of `weights`.
    pub fn contains_cocharacter(&self, s: &QMatrix, weights: &[Q]) -> bool {
        let Some(sinv) = s.inverse() else { return false };
        if weights.len() != self.n || s.rows() != self.n {
            return false;
        }
        let k = integer_multiple(weights);
        let entry = |i: usize, j: usize| -> Laurent {
            let mut p = Laurent::default();
            for (t, kt) in k.iter().enumerate() {
                p.add_term(*kt, &s[(i, t)] * &sinv[(t, j)]);
            }
            p
        };
        for i in 0..self.n {
            for j in 0..self.n {
                let ok = match self.pattern[i][j] {
                    Entry::Free => true,
                    Entry::Zero => entry(i, j).is_zero(),
                    Entry::One => entry(i, j).is_constant(&Q::one()),
                };
                if !ok {
                    return false;
                }
            }
        }
        self.det.iter().all(|d| {
            let m: Vec<Vec<Laurent>> = d
                .block
                .iter()
                .map(|&i| d.block.iter().map(|&j| entry(i, j)).collect())
                .collect();
            let det = laurent_det(&m);
            match &d.value {
                DetValue::Unit => det.is_monomial(),
                DetValue::Value(v) => det.is_constant(v),
            }
        })
    }

    /// The Levi `Z_H(λ)` of a diagonal cocharacter with these weights, as a
    /// block group (entries between different weights are zero).
    pub fn diagonal_levi(&self, weights: &[Q]) -> Result<BlockGroupSpec, GlError> {
        let pattern = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        if weights[i] == weights[j] {
                            self.pattern[i][j]
                        } else {
                            Entry::Zero
                        }
                    })
                    .collect()
            })
            .collect();
        BlockGroupSpec::new(format!("L({})", self.name), self.n, pattern, self.det.clone())
    }
}

fn block_index(sizes: &[usize]) -> Vec<usize> {
    sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &s)| std::iter::repeat(b).take(s))
        .collect()
}

/// Solves `det(g[B,B]) = v` for one free entry of the block, which enters
/// the determinant affinely.
fn fix_block_det<R: Rng + ?Sized>(g: &mut QMatrix, pattern: &[Vec<Entry>], block: &[usize], v: &Q, rng: &mut R) {
    let mut cells: Vec<(usize, usize)> = block
        .iter()
        .flat_map(|&i| block.iter().map(move |&j| (i, j)))
        .filter(|&(i, j)| pattern[i][j] == Entry::Free)
        .collect();
    // Prefer diagonal cells, otherwise random order.
    cells.sort_by_key(|&(i, j)| (i != j, rng.gen::<u32>()));
    for (i, j) in cells {
        let old = g[(i, j)].clone();
        g[(i, j)] = Q::zero();
        let alpha = g.submatrix(block, block).det();
        g[(i, j)] = Q::one();
        let beta = g.submatrix(block, block).det() - &alpha;
        if !beta.is_zero() {
            g[(i, j)] = (v - alpha) / beta;
            return;
        }
        g[(i, j)] = old;
    }
}

/// Smallest positive integer multiple of a rational vector, as `i64`s.
pub(crate) fn integer_multiple(w: &[Q]) -> Vec<i64> {
    let mut l = num::BigInt::one();
    for x in w {
        l = num::integer::lcm(l, x.denom().clone());
    }
    w.iter()
        .map(|x| {
            let v = (x * Q::from_integer(l.clone())).to_integer();
            i64::try_from(v).expect("weights fit in 64 bits")
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Laurent(BTreeMap<i64, Q>);

impl Laurent {
    fn add_term(&mut self, k: i64, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry(k).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&k);
        }
    }

    fn mul(&self, o: &Laurent) -> Laurent {
        let mut out = Laurent::default();
        for (a, x) in &self.0 {
            for (b, y) in &o.0 {
                out.add_term(a + b, x * y);
            }
        }
        out
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn is_constant(&self, v: &Q) -> bool {
        if v.is_zero() {
            return self.is_zero();
        }
        self.0.len() == 1 && self.0.get(&0) == Some(v)
    }

    fn is_monomial(&self) -> bool {
        self.0.len() == 1
    }
}

/// Leibniz expansion; blocks are desk-sized.
fn laurent_det(m: &[Vec<Laurent>]) -> Laurent {
    let n = m.len();
    let mut out = Laurent::default();
    let mut perm: Vec<usize> = (0..n).collect();
    permutations(&mut perm, 0, &mut |p| {
        let mut term = Laurent::default();
        term.add_term(0, if parity(p) { Q::one() } else { -Q::one() });
        for (i, &j) in p.iter().enumerate() {
            term = term.mul(&m[i][j]);
            if term.is_zero() {
                return;
            }
        }
        for (k, c) in term.0 {
            out.add_term(k, c);
        }
    });
    out
}

pub(crate) fn permutations(v: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, f);
        v.swap(k, i);
    }
}

/// `true` for even permutations.
fn parity(p: &[usize]) -> bool {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::q;

    #[test]
    fn catalog_membership() {
        let b = BlockGroupSpec::borel_sl2();
        assert!(!b.contains(&QMatrix::from_i64(&[vec![2, 5], vec![0, 1]])));
        let m = QMatrix::from_rows(vec![vec![q(2), q(5)], vec![q(0), crate::lattice::qf(1, 2)]]);
        assert!(b.contains(&m));
        assert!(b.is_subgroup_of(&BlockGroupSpec::sl(2)));
        assert!(!BlockGroupSpec::sl(2).is_subgroup_of(&b));
        let h = BlockGroupSpec::gl2_semidirect();
        assert!(h.is_subgroup_of(&BlockGroupSpec::gl(3)));
        assert!(h.contains(&QMatrix::from_i64(&[vec![1, 2, 3], vec![0, 1, 4], vec![0, 0, 1]])));
    }

    #[test]
    fn non_groups_rejected() {
        use Entry::*;
        let bad = BlockGroupSpec::new("x", 2, vec![vec![Free, One], vec![Zero, Free]], vec![]);
        assert!(matches!(bad, Err(GlError::BadSpec(_))));
        let bad = BlockGroupSpec::new(
            "y",
            2,
            vec![vec![Free, Free], vec![Free, Free]],
            vec![DetConstraint {
                block: vec![0],
                value: DetValue::Unit,
            }],
        );
        assert!(matches!(bad, Err(GlError::BadSpec(_))));
    }

    #[test]
    fn cocharacter_membership() {
        let sl2 = BlockGroupSpec::sl(2);
        let id = QMatrix::identity(2);
        assert!(sl2.contains_cocharacter(&id, &[q(1), q(-1)]));
        assert!(!sl2.contains_cocharacter(&id, &[q(1), q(0)]));
        let h = BlockGroupSpec::gl2_semidirect();
        assert!(h.contains_cocharacter(&QMatrix::identity(3), &[q(1), q(-1), q(0)]));
        assert!(!h.contains_cocharacter(&QMatrix::identity(3), &[q(1), q(-1), q(1)]));
        // Conjugating by a translation keeps the cocharacter in the group.
        let t = QMatrix::from_i64(&[vec![1, 0, 2], vec![0, 1, 5], vec![0, 0, 1]]);
        assert!(h.contains_cocharacter(&t, &[q(1), q(-1), q(0)]));
        let swap = QMatrix::from_i64(&[vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
        assert!(!h.contains_cocharacter(&swap, &[q(1), q(-1), q(0)]));
    }

    #[test]
    fn file_round_trip() {
        let text = "name = \"B\"\nn = 2\npattern = [\"ff\", \"zf\"]\n[[det]]\nblock = [0, 1]\nvalue = \"1\"\n";
        let b: BlockGroupSpec = toml::from_str(text).unwrap();
        assert_eq!(b, BlockGroupSpec::borel_sl2());
        let again: BlockGroupSpec = toml::from_str(&toml::to_string(&b).unwrap()).unwrap();
        assert_eq!(again, b);
    }
}
