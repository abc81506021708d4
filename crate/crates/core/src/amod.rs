//! Finite strictly unital A-infinity modules over A = Z2[e]/(e^2).
//!
//! A module is stored as the maps `m_k(a) = mu^k(a, e, ..., e)` (right) or
//! `mu^k(e, ..., e, a)` (left). The unit acts as the identity and never
//! appears in a higher product, so these maps determine everything.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2lin::{barcode, Barcode, F2Matrix, PolyMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StandardModuleKind {
    TrivialZ2,
    R(usize),
    L(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AModule {
    side: Side,
    dim: usize,
    /// `actions[k - 1]` is `m_k`.
    actions: Vec<F2Matrix>,
}

impl AModule {
    /// Builds a module from its action maps; shapes are checked, relations are not.
    pub fn new(side: Side, dim: usize, actions: Vec<F2Matrix>) -> Result<Self> {
        for (k, m) in actions.iter().enumerate() {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::Dimension(format!(
                    "m_{} is {}x{}, expected {dim}x{dim}",
                    k + 1,
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(AModule { side, dim, actions })
    }

    pub fn zero(side: Side) -> Self {
        AModule {
            side,
            dim: 0,
            actions: Vec::new(),
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Highest stored order `K`.
    pub fn max_order(&self) -> usize {
        self.actions.len()
    }

    pub fn actions(&self) -> &[F2Matrix] {
        &self.actions
    }

    /// `m_k`, zero beyond the stored range.
    pub fn action(&self, k: usize) -> F2Matrix {
        assert!(k >= 1, "actions are indexed from 1");
        self.actions
            .get(k - 1)
            .cloned()
            .unwrap_or_else(|| F2Matrix::zeros(self.dim, self.dim))
    }

    pub(crate) fn action_ref(&self, k: usize) -> Option<&F2Matrix> {
        self.actions.get(k - 1).filter(|m| !m.is_zero())
    }

    /// Drops trailing zero actions.
    pub fn trimmed(mut self) -> Self {
        while self.actions.last().is_some_and(|m| m.is_zero()) {
            self.actions.pop();
        }
        self
    }

    /// Every `n <= 2K` with `sum_{i+j=n+1} m_i m_j != 0`.
    pub fn validate(&self) -> Vec<usize> {
        let k = self.max_order();
        let mut bad = Vec::new();
        for n in 1..=2 * k {
            let mut acc = F2Matrix::zeros(self.dim, self.dim);
            for i in 1..=n.min(k) {
                let j = n + 1 - i;
                if j > k {
                    continue;
                }
                let (Some(a), Some(b)) = (self.action_ref(i), self.action_ref(j)) else {
                    continue;
                };
                acc.add_assign(&a.mul(b).expect("square actions"));
            }
            if !acc.is_zero() {
                bad.push(n);
            }
        }
        bad
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    fn ensure_valid(&self) -> Result<()> {
        let bad = self.validate();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "A-infinity module relations fail for n in {bad:?}"
            )))
        }
    }

    /// Simultaneous conjugation `p m_k p^{-1}`.
    pub fn conjugate(&self, p: &F2Matrix) -> Result<AModule> {
        let inv = p
            .inverse()
            .ok_or_else(|| Error::InvalidArgument("conjugating matrix is singular".into()))?;
        let actions = self
            .actions
            .iter()
            .map(|m| p.mul(m)?.mul(&inv))
            .collect::<Result<Vec<_>>>()?;
        AModule::new(self.side, self.dim, actions)
    }

    pub fn to_spec(&self) -> ModuleSpec {
        ModuleSpec {
            side: self.side,
            dim: self.dim,
            actions: self
                .actions
                .iter()
                .enumerate()
                .filter(|(_, m)| !m.is_zero())
                .map(|(i, m)| ActionSpec {
                    k: i + 1,
                    matrix: m.to_rows(),
                })
                .collect(),
        }
    }

    pub fn from_spec(spec: &ModuleSpec) -> Result<Self> {
        let max_k = spec.actions.iter().map(|a| a.k).max().unwrap_or(0);
        let mut actions = vec![F2Matrix::zeros(spec.dim, spec.dim); max_k];
        let mut seen = vec![false; max_k];
        for a in &spec.actions {
            if a.k == 0 {
                return Err(Error::InvalidArgument("action order k must be >= 1".into()));
            }
            if seen[a.k - 1] {
                return Err(Error::InvalidArgument(format!("action k = {} given twice", a.k)));
            }
            seen[a.k - 1] = true;
            if a.matrix.len() != spec.dim {
                return Err(Error::Dimension(format!(
                    "m_{} has {} rows, expected {}",
                    a.k,
                    a.matrix.len(),
                    spec.dim
                )));
            }
            let m = if spec.dim == 0 {
                F2Matrix::zeros(0, 0)
            } else {
                F2Matrix::from_rows(&a.matrix)?
            };
            actions[a.k - 1] = m;
        }
        AModule::new(spec.side, spec.dim, actions)
    }
}

/// JSON shape `{ "side": ..., "dim": ..., "actions": [ { "k": ..., "matrix": [[...]] } ] }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub side: Side,
    pub dim: usize,
    pub actions: Vec<ActionSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    pub k: usize,
    pub matrix: Vec<Vec<u8>>,
}

pub fn standard(kind: StandardModuleKind) -> Result<AModule> {
    match kind {
        StandardModuleKind::TrivialZ2 => AModule::new(Side::Right, 1, Vec::new()),
        StandardModuleKind::R(k) => standard_two_dim(Side::Right, k),
        StandardModuleKind::L(k) => standard_two_dim(Side::Left, k),
    }
}

/// The trivial one-dimensional module on a given side.
pub fn trivial(side: Side) -> AModule {
    AModule {
        side,
        dim: 1,
        actions: Vec::new(),
    }
}

/// `R(k)` on the right or `L(k)` on the left.
pub fn standard_on(side: Side, k: usize) -> Result<AModule> {
    standard_two_dim(side, k)
}

fn standard_two_dim(side: Side, k: usize) -> Result<AModule> {
    if k < 1 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let mut actions = vec![F2Matrix::zeros(2, 2); k];
    actions[k - 1].set(1, 0, true);
    AModule::new(side, 2, actions)
}

/// `sum_k t^(k-1) m_k` over Z2[t]/(t^n).
pub fn t_matrix(m: &AModule, n: usize) -> Result<PolyMatrix> {
    let k = m.max_order();
    if n == 0 || n + 1 < 2 * k {
        return Err(Error::InvalidArgument(format!(
            "truncation {n} is below 2K-1 = {} for K = {k}",
            (2 * k).saturating_sub(1)
        )));
    }
    if k == 0 {
        return Ok(PolyMatrix::zeros(m.dim, m.dim, n));
    }
    PolyMatrix::from_layers(&m.actions, n)
}

/// Truncation used by [`classify`].
pub fn classify_truncation(m: &AModule) -> usize {
    let k = m.max_order();
    (m.dim * k + 1).max(2 * k)
}

/// Quasi-isomorphism type: free summands count trivial modules, a torsion
/// exponent `e` stands for `R(e+1)` or `L(e+1)`.
pub fn classify(m: &AModule) -> Result<Barcode> {
    m.ensure_valid()?;
    barcode(&t_matrix(m, classify_truncation(m))?)
}

/// Minimal representative of a barcode.
pub fn canonical(b: &Barcode, side: Side) -> AModule {
    let mut out = AModule::zero(side);
    for _ in 0..b.free_rank {
        out = direct_sum(&out, &trivial(side)).expect("same side");
    }
    for &e in &b.torsion {
        let r = standard_two_dim(side, e + 1).expect("k >= 1");
        out = direct_sum(&out, &r).expect("same side");
    }
    out
}

pub fn direct_sum(a: &AModule, b: &AModule) -> Result<AModule> {
    if a.side != b.side {
        return Err(Error::InvalidArgument(
            "cannot sum a left module with a right module".into(),
        ));
    }
    let k = a.max_order().max(b.max_order());
    let actions = (1..=k)
        .map(|i| a.action(i).direct_sum(&b.action(i)))
        .collect();
    AModule::new(a.side, a.dim + b.dim, actions)
}

pub fn quasi_iso(a: &AModule, b: &AModule) -> Result<bool> {
    if a.side != b.side {
        return Err(Error::InvalidArgument(
            "cannot compare a left module with a right module".into(),
        ));
    }
    Ok(classify(a)? == classify(b)?)
}

/// Random generators for tests and sweep guards.
pub mod random {
    use super::*;
    use rand::Rng;

    /// Random invertible matrix from elementary row operations.
    pub fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> F2Matrix {
        let mut p = F2Matrix::identity(n);
        if n < 2 {
            return p;
        }
        for _ in 0..4 * n {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                let src = p.row(b).clone();
                for j in src.ones() {
                    p.flip(a, j);
                }
            }
        }
        p
    }

    /// Random valid module of dimension `<= max_dim` and order `<= max_k`.
    ///
    /// Starts from a sum of standard modules (including `R(1)`), then applies
    /// a random polynomial gauge `F(t) = prod (1 + t^a E_ij)` and a constant
    /// change of basis. Gauges whose result exceeds `max_k` are skipped.
    pub fn random_module<R: Rng>(rng: &mut R, side: Side, max_dim: usize, max_k: usize) -> AModule {
        let dim = rng.gen_range(0..=max_dim);
        let mut m = AModule::zero(side);
        while m.dim < dim {
            let room = dim - m.dim;
            let piece = if room >= 2 && rng.gen_bool(0.6) {
                standard_two_dim(side, rng.gen_range(1..=max_k)).unwrap()
            } else {
                trivial(side)
            };
            m = direct_sum(&m, &piece).unwrap();
        }
        if dim >= 2 {
            for _ in 0..rng.gen_range(0..6) {
                let (i, j) = (rng.gen_range(0..dim), rng.gen_range(0..dim));
                let a = rng.gen_range(0..max_k);
                if i == j {
                    continue;
                }
                if let Some(g) = gauge(&m, i, j, a, max_k) {
                    m = g;
                }
            }
        }
        let p = random_invertible(rng, dim);
        m.conjugate(&p).unwrap().trimmed()
    }

    /// Conjugates the t-differential by `1 + t^a E_ij`, which is its own inverse.
    fn gauge(m: &AModule, i: usize, j: usize, a: usize, max_k: usize) -> Option<AModule> {
        let k = m.max_order();
        let top = k + 2 * a;
        let mut layers = vec![F2Matrix::zeros(m.dim, m.dim); top];
        for (d, mk) in m.actions.iter().enumerate() {
            // (1 + t^a E) D (1 + t^a E) = D + t^a (E D + D E) + t^{2a} E D E
            layers[d].add_assign(mk);
            for c in 0..m.dim {
                if mk.get(j, c) {
                    layers[d + a].flip(i, c);
                }
                if mk.get(c, i) {
                    layers[d + a].flip(c, j);
                }
            }
            if mk.get(j, i) {
                layers[d + 2 * a].flip(i, j);
            }
        }
        let out = AModule::new(m.side, m.dim, layers).ok()?.trimmed();
        (out.max_order() <= max_k).then_some(out)
    }
}
