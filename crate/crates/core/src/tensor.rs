//! Tensor fields on a chart with expression components.
//!
//! Components are stored row-major over the slot indices. A field produced
//! by [`TensorField::coordinate_gradient`] carries `tensorial = false`; the
//! operations that only make sense for honest tensors refuse such fields.

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::expr::{Differentiator, Expr, Tape};
use crate::linalg;
use alloc::format;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variance {
    Up,
    Down,
}

#[derive(Debug, Clone)]
pub struct TensorField {
    chart: Arc<Chart>,
    slots: Vec<Variance>,
    comps: Vec<Expr>,
    tensorial: bool,
}

/// Iterates over all multi-indices of length `rank` with entries below `n`.
pub fn multi_indices(n: usize, rank: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(rank as u32);
    (0..total).map(move |mut k| {
        let mut idx = vec![0; rank];
        for s in (0..rank).rev() {
            idx[s] = k % n;
            k /= n;
        }
        idx
    })
}

fn flat(n: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

/// Sign of a permutation given as a list of distinct positions.
pub fn perm_sign(p: &[usize]) -> f64 {
    let mut sign = 1.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

impl TensorField {
    pub fn new(chart: Arc<Chart>, slots: Vec<Variance>, comps: Vec<Expr>) -> Result<Self> {
        let want = chart.dim().pow(slots.len() as u32);
        if comps.len() != want {
            return Err(Error::DimensionMismatch(format!(
                "{} components given, {want} expected",
                comps.len()
            )));
        }
        Ok(TensorField {
            chart,
            slots,
            comps,
            tensorial: true,
        })
    }

    pub fn from_fn(
        chart: Arc<Chart>,
        slots: Vec<Variance>,
        mut f: impl FnMut(&[usize]) -> Expr,
    ) -> Self {
        let n = chart.dim();
        let comps = multi_indices(n, slots.len()).map(|i| f(&i)).collect();
        TensorField {
            chart,
            slots,
            comps,
            tensorial: true,
        }
    }

    pub fn zeros(chart: Arc<Chart>, slots: Vec<Variance>) -> Self {
        Self::from_fn(chart, slots, |_| Expr::zero())
    }

    pub fn scalar(chart: Arc<Chart>, e: Expr) -> Self {
        TensorField {
            chart,
            slots: Vec::new(),
            comps: vec![e],
            tensorial: true,
        }
    }

    /// Symmetric (0,2) field from its upper triangle `upper[i][j]`, `i <= j`.
    pub fn symmetric_from_upper(chart: Arc<Chart>, upper: &[Vec<Expr>]) -> Result<Self> {
        let n = chart.dim();
        check_triangle(upper, n, 0)?;
        Ok(Self::from_fn(chart, vec![Variance::Down; 2], |i| {
            let (a, b) = (i[0].min(i[1]), i[0].max(i[1]));
            upper[a][b - a].clone()
        }))
    }

    /// Antisymmetric (0,2) field from its strict upper triangle `upper[i][j-i-1]`.
    pub fn antisymmetric_from_upper(chart: Arc<Chart>, upper: &[Vec<Expr>]) -> Result<Self> {
        let n = chart.dim();
        check_triangle(upper, n, 1)?;
        Ok(Self::from_fn(chart, vec![Variance::Down; 2], |i| {
            if i[0] == i[1] {
                Expr::zero()
            } else if i[0] < i[1] {
                upper[i[0]][i[1] - i[0] - 1].clone()
            } else {
                -&upper[i[1]][i[0] - i[1] - 1]
            }
        }))
    }

    /// Totally antisymmetric field of rank `p` from the strictly increasing
    /// components, `f(&[i0 < i1 < ...])`.
    pub fn form_from_increasing(
        chart: Arc<Chart>,
        p: usize,
        mut f: impl FnMut(&[usize]) -> Expr,
    ) -> Self {
        let n = chart.dim();
        let mut base = hashbrown::HashMap::new();
        for idx in multi_indices(n, p) {
            if idx.windows(2).all(|w| w[0] < w[1]) {
                base.insert(idx.clone(), f(&idx));
            }
        }
        Self::from_fn(chart, vec![Variance::Down; p], |idx| {
            let mut order: Vec<usize> = (0..p).collect();
            order.sort_by_key(|&k| idx[k]);
            let sorted: Vec<usize> = order.iter().map(|&k| idx[k]).collect();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Expr::zero();
            }
            let e = base[&sorted].clone();
            if perm_sign(&order) < 0.0 {
                -e
            } else {
                e
            }
        })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[Variance] {
        &self.slots
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<Expr> {
        self.comps
    }

    pub fn is_tensorial(&self) -> bool {
        self.tensorial
    }

    pub fn get(&self, idx: &[usize]) -> &Expr {
        &self.comps[flat(self.dim(), idx)]
    }

    pub fn set(&mut self, idx: &[usize], e: Expr) {
        let k = flat(self.dim(), idx);
        self.comps[k] = e;
    }

    fn same_chart(&self, other: &TensorField) -> Result<()> {
        if Arc::ptr_eq(&self.chart, &other.chart) || *self.chart == *other.chart {
            Ok(())
        } else {
            Err(Error::ChartMismatch)
        }
    }

    fn require_tensorial(&self) -> Result<()> {
        if self.tensorial {
            Ok(())
        } else {
            Err(Error::NonTensorial)
        }
    }

    fn map(&self, f: impl Fn(&Expr) -> Expr) -> TensorField {
        TensorField {
            chart: self.chart.clone(),
            slots: self.slots.clone(),
            comps: self.comps.iter().map(f).collect(),
            tensorial: self.tensorial,
        }
    }

    fn zip(&self, other: &TensorField, f: impl Fn(&Expr, &Expr) -> Expr) -> Result<TensorField> {
        self.same_chart(other)?;
        if self.slots != other.slots {
            return Err(Error::VarianceMismatch("operands have different slot layouts".into()));
        }
        Ok(TensorField {
            chart: self.chart.clone(),
            slots: self.slots.clone(),
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| f(a, b)).collect(),
            tensorial: self.tensorial && other.tensorial,
        })
    }

    pub fn add(&self, other: &TensorField) -> Result<TensorField> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &TensorField) -> Result<TensorField> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: &Expr) -> TensorField {
        self.map(|a| a * s)
    }

    pub fn tensor_product(&self, other: &TensorField) -> Result<TensorField> {
        self.same_chart(other)?;
        let mut slots = self.slots.clone();
        slots.extend_from_slice(&other.slots);
        let mut comps = Vec::with_capacity(self.comps.len() * other.comps.len());
        for a in &self.comps {
            for b in &other.comps {
                comps.push(a * b);
            }
        }
        Ok(TensorField {
            chart: self.chart.clone(),
            slots,
            comps,
            tensorial: self.tensorial && other.tensorial,
        })
    }

    /// Trace over slots `a` and `b`, which must have opposite variance.
    pub fn contract(&self, a: usize, b: usize) -> Result<TensorField> {
        self.require_tensorial()?;
        self.check_slot(a)?;
        self.check_slot(b)?;
        if a == b || self.slots[a] == self.slots[b] {
            return Err(Error::VarianceMismatch(
                "contraction needs one upper and one lower slot".into(),
            ));
        }
        Ok(self.trace_pair(a, b))
    }

    fn trace_pair(&self, a: usize, b: usize) -> TensorField {
        let n = self.dim();
        let slots: Vec<Variance> = self
            .slots
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != a && *k != b)
            .map(|(_, v)| *v)
            .collect();
        let comps = multi_indices(n, slots.len())
            .map(|rest| {
                let terms = (0..n)
                    .map(|i| {
                        let mut full = Vec::with_capacity(self.rank());
                        let mut it = rest.iter();
                        for k in 0..self.rank() {
                            full.push(if k == a || k == b { i } else { *it.next().unwrap() });
                        }
                        self.get(&full).clone()
                    })
                    .collect();
                Expr::sum(terms)
            })
            .collect();
        TensorField {
            chart: self.chart.clone(),
            slots,
            comps,
            tensorial: true,
        }
    }

    fn check_slot(&self, s: usize) -> Result<()> {
        if s < self.rank() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!("slot {s} out of range for rank {}", self.rank())))
        }
    }

    /// Contracts slot `slot` with the first index of a matrix `m` (row-major,
    /// `m[i*n + j]`) and puts the free index back in place.
    fn apply_matrix(&self, slot: usize, m: &[Expr], to: Variance) -> TensorField {
        let n = self.dim();
        let comps = multi_indices(n, self.rank())
            .map(|idx| {
                let terms = (0..n)
                    .map(|i| {
                        let mut src = idx.clone();
                        src[slot] = i;
                        &m[idx[slot] * n + i] * self.get(&src)
                    })
                    .collect();
                Expr::sum(terms)
            })
            .collect();
        let mut slots = self.slots.clone();
        slots[slot] = to;
        TensorField {
            chart: self.chart.clone(),
            slots,
            comps,
            tensorial: true,
        }
    }

    fn check_metric(&self, m: &TensorField, want: Variance) -> Result<()> {
        self.same_chart(m)?;
        if m.slots != [want, want] {
            return Err(Error::VarianceMismatch("metric argument has the wrong variance".into()));
        }
        m.require_tensorial()?;
        check_nondegenerate(&m.comps, self.dim(), &self.chart.sample_points())
    }

    pub fn raise_index(&self, g_inv: &TensorField, slot: usize) -> Result<TensorField> {
        self.require_tensorial()?;
        self.check_slot(slot)?;
        if self.slots[slot] != Variance::Down {
            return Err(Error::VarianceMismatch(format!("slot {slot} is already upper")));
        }
        self.check_metric(g_inv, Variance::Up)?;
        Ok(self.apply_matrix(slot, &g_inv.comps, Variance::Up))
    }

    pub fn lower_index(&self, g: &TensorField, slot: usize) -> Result<TensorField> {
        self.require_tensorial()?;
        self.check_slot(slot)?;
        if self.slots[slot] != Variance::Up {
            return Err(Error::VarianceMismatch(format!("slot {slot} is already lower")));
        }
        self.check_metric(g, Variance::Down)?;
        Ok(self.apply_matrix(slot, &g.comps, Variance::Down))
    }

    fn permute_sum(&self, set: &[usize], signed: bool) -> Result<TensorField> {
        self.require_tensorial()?;
        for &s in set {
            self.check_slot(s)?;
            if self.slots[s] != self.slots[set[0]] {
                return Err(Error::VarianceMismatch(
                    "(anti)symmetrized slots must share variance".into(),
                ));
            }
        }
        let perms = permutations(set.len());
        let w = 1.0 / perms.len() as f64;
        let comps = multi_indices(self.dim(), self.rank())
            .map(|idx| {
                let terms = perms
                    .iter()
                    .map(|p| {
                        let mut src = idx.clone();
                        for (k, &s) in set.iter().enumerate() {
                            src[s] = idx[set[p[k]]];
                        }
                        let c = if signed { w * perm_sign(p) } else { w };
                        c * self.get(&src)
                    })
                    .collect();
                Expr::sum(terms)
            })
            .collect();
        Ok(TensorField {
            chart: self.chart.clone(),
            slots: self.slots.clone(),
            comps,
            tensorial: true,
        })
    }

    /// Projection onto the part antisymmetric in the slots of `set`.
    pub fn antisymmetrize(&self, set: &[usize]) -> Result<TensorField> {
        self.permute_sum(set, true)
    }

    pub fn symmetrize(&self, set: &[usize]) -> Result<TensorField> {
        self.permute_sum(set, false)
    }

    /// Reorders slots: slot `k` of the result is slot `perm[k]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<TensorField> {
        let r = self.rank();
        let mut seen = vec![false; r];
        if perm.len() != r || perm.iter().any(|&p| p >= r || core::mem::replace(&mut seen[p], true)) {
            return Err(Error::DimensionMismatch("not a permutation of the slots".into()));
        }
        let slots = perm.iter().map(|&p| self.slots[p]).collect();
        let comps = multi_indices(self.dim(), r)
            .map(|idx| {
                let mut src = vec![0; r];
                for k in 0..r {
                    src[perm[k]] = idx[k];
                }
                self.get(&src).clone()
            })
            .collect();
        Ok(TensorField {
            chart: self.chart.clone(),
            slots,
            comps,
            tensorial: self.tensorial,
        })
    }

    /// Partial derivatives with a new leading lower slot. Not a tensor in
    /// general, and flagged as such.
    pub fn coordinate_gradient(&self) -> TensorField {
        let mut d = Differentiator::new();
        self.gradient_with(&mut d)
    }

    pub(crate) fn gradient_with(&self, d: &mut Differentiator) -> TensorField {
        let n = self.dim();
        let mut comps = Vec::with_capacity(n * self.comps.len());
        for mu in 0..n {
            for c in &self.comps {
                comps.push(d.diff(c, mu));
            }
        }
        let mut slots = vec![Variance::Down];
        slots.extend_from_slice(&self.slots);
        TensorField {
            chart: self.chart.clone(),
            slots,
            comps,
            tensorial: false,
        }
    }

    /// Marks a hand-assembled field as tensorial (for example a gradient
    /// already corrected by connection terms).
    pub fn assume_tensorial(mut self) -> TensorField {
        self.tensorial = true;
        self
    }

    pub fn eval_at(&self, point: &[f64]) -> Result<Vec<f64>> {
        Tape::compile(&self.comps).eval(point)
    }

    /// Largest component magnitude over the chart's sample points.
    pub fn max_abs(&self) -> Result<f64> {
        Ok(crate::check::max_abs(&self.comps, &self.chart.sample_points())?.value)
    }

    /// Verifies antisymmetry in every pair of `set` at the sample points.
    pub fn check_antisymmetric(&self, set: &[usize], tol: f64) -> Result<()> {
        let mut diffs = Vec::new();
        for (ia, &a) in set.iter().enumerate() {
            for &b in &set[ia + 1..] {
                let mut perm: Vec<usize> = (0..self.rank()).collect();
                perm.swap(a, b);
                let swapped = self.permute(&perm)?;
                diffs.extend(self.comps.iter().zip(&swapped.comps).map(|(x, y)| x + y));
            }
        }
        let r = crate::check::max_abs(&diffs, &self.chart.sample_points())?;
        if r.value > tol {
            return Err(Error::NotAntisymmetric(format!(
                "max |T + T^swap| = {:e} at {:?}",
                r.value, r.point
            )));
        }
        Ok(())
    }

    pub fn check_symmetric(&self, a: usize, b: usize, tol: f64) -> Result<()> {
        let mut perm: Vec<usize> = (0..self.rank()).collect();
        perm.swap(a, b);
        let swapped = self.permute(&perm)?;
        let diffs: Vec<Expr> = self.comps.iter().zip(&swapped.comps).map(|(x, y)| x - y).collect();
        let r = crate::check::max_abs(&diffs, &self.chart.sample_points())?;
        if r.value > tol {
            return Err(Error::Invalid(format!("not symmetric: {:e} at {:?}", r.value, r.point)));
        }
        Ok(())
    }
}

fn check_triangle(upper: &[Vec<Expr>], n: usize, skip: usize) -> Result<()> {
    let ok = upper.len() >= n.saturating_sub(skip)
        && (0..n.saturating_sub(skip)).all(|i| upper[i].len() == n - i - skip);
    if ok {
        Ok(())
    } else {
        Err(Error::DimensionMismatch("triangle rows have the wrong lengths".to_string()))
    }
}

/// Errors with `SingularMetric` when `|det m| < 1e-10` at some point.
pub fn check_nondegenerate(m: &[Expr], n: usize, points: &[Vec<f64>]) -> Result<()> {
    let tape = Tape::compile(m);
    for p in points {
        let v = tape.eval(p)?;
        let d = linalg::num_det(&v, n);
        if !(d.abs() >= 1e-10) {
            return Err(Error::SingularMetric {
                det: d,
                point: p.clone(),
            });
        }
    }
    Ok(())
}

/// Symbolic inverse of a (0,2) or (2,0) field, with the opposite variance.
pub fn metric_inverse(g: &TensorField) -> Result<TensorField> {
    g.require_tensorial()?;
    if g.rank() != 2 || g.slots[0] != g.slots[1] {
        return Err(Error::VarianceMismatch("expected a (0,2) or (2,0) field".into()));
    }
    let n = g.dim();
    check_nondegenerate(&g.comps, n, &g.chart.sample_points())?;
    let (inv, _) = linalg::inverse(&g.comps, n);
    let v = match g.slots[0] {
        Variance::Up => Variance::Down,
        Variance::Down => Variance::Up,
    };
    TensorField::new(g.chart.clone(), vec![v, v], inv)
}

/// Exterior derivative of a p-form given with all slots lower:
/// `(dα)_{i0..ip} = Σ_k (-1)^k ∂_{ik} α_{i0..îk..ip}`.
pub fn exterior_derivative(alpha: &TensorField) -> Result<TensorField> {
    alpha.require_tensorial()?;
    if alpha.slots.iter().any(|v| *v != Variance::Down) {
        return Err(Error::VarianceMismatch("exterior derivative needs a form".into()));
    }
    let p = alpha.rank();
    let grad = alpha.coordinate_gradient();
    Ok(TensorField::from_fn(alpha.chart.clone(), vec![Variance::Down; p + 1], |idx| {
        let terms = (0..=p)
            .map(|k| {
                let mut src = Vec::with_capacity(p + 1);
                src.push(idx[k]);
                src.extend(idx.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, &i)| i));
                let t = grad.get(&src).clone();
                if k % 2 == 1 {
                    -t
                } else {
                    t
                }
            })
            .collect();
        Expr::sum(terms)
    }))
}

/// Interior product `i_X α`, filling the first slot of α.
pub fn interior(x: &[Expr], alpha: &TensorField) -> Result<TensorField> {
    if alpha.rank() == 0 || alpha.slots[0] != Variance::Down || x.len() != alpha.dim() {
        return Err(Error::VarianceMismatch("interior product needs a vector and a form".into()));
    }
    let n = alpha.dim();
    let slots = alpha.slots[1..].to_vec();
    Ok(TensorField::from_fn(alpha.chart.clone(), slots, |rest| {
        let terms = (0..n)
            .map(|i| {
                let mut idx = vec![i];
                idx.extend_from_slice(rest);
                &x[i] * alpha.get(&idx)
            })
            .collect();
        Expr::sum(terms)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart2() -> Arc<Chart> {
        Arc::new(Chart::new(&["x", "y"]).unwrap())
    }

    fn parse_all(c: &Chart, src: &[&str]) -> Vec<Expr> {
        src.iter().map(|s| c.parse(s).unwrap()).collect()
    }

    #[test]
    fn contraction_variance_is_checked() {
        let c = chart2();
        let v = TensorField::new(c.clone(), vec![Variance::Up], parse_all(&c, &["x", "y"])).unwrap();
        let w = TensorField::new(c.clone(), vec![Variance::Down], parse_all(&c, &["y", "1"])).unwrap();
        let vw = v.tensor_product(&w).unwrap();
        let tr = vw.contract(0, 1).unwrap();
        let p = [0.4, 2.0];
        assert!((tr.eval_at(&p).unwrap()[0] - (0.4 * 2.0 + 2.0)).abs() < 1e-15);
        let vv = v.tensor_product(&v).unwrap();
        assert!(matches!(vv.contract(0, 1), Err(Error::VarianceMismatch(_))));
    }

    #[test]
    fn gradient_is_non_tensorial() {
        let c = chart2();
        let w = TensorField::new(c.clone(), vec![Variance::Down], parse_all(&c, &["x*y", "y"])).unwrap();
        let g = w.coordinate_gradient();
        assert!(!g.is_tensorial());
        assert!(matches!(g.antisymmetrize(&[0, 1]), Err(Error::NonTensorial)));
        assert!(matches!(g.contract(0, 1), Err(Error::NonTensorial)));
    }

    #[test]
    fn chart_mismatch() {
        let a = TensorField::scalar(chart2(), Expr::one());
        let b = TensorField::scalar(Arc::new(Chart::new(&["u", "v"]).unwrap()), Expr::one());
        assert!(matches!(a.tensor_product(&b), Err(Error::ChartMismatch)));
    }

    #[test]
    fn raise_then_lower_roundtrips() {
        let c = chart2();
        let g = TensorField::symmetric_from_upper(
            c.clone(),
            &[parse_all(&c, &["2 + x^2", "x*y"]), parse_all(&c, &["3 + y^2"])],
        )
        .unwrap();
        let gi = metric_inverse(&g).unwrap();
        let w = TensorField::new(c.clone(), vec![Variance::Down], parse_all(&c, &["sin(x)", "y"])).unwrap();
        let back = w.raise_index(&gi, 0).unwrap().lower_index(&g, 0).unwrap();
        let diff = back.sub(&w).unwrap();
        assert!(diff.max_abs().unwrap() < 1e-13);
    }

    #[test]
    fn singular_metric_is_rejected() {
        let c = chart2();
        let g = TensorField::symmetric_from_upper(c.clone(), &[parse_all(&c, &["1", "1"]), parse_all(&c, &["1"])]).unwrap();
        assert!(matches!(metric_inverse(&g), Err(Error::SingularMetric { .. })));
    }

    #[test]
    fn d_squared_vanishes() {
        let c = Arc::new(Chart::new(&["x", "y", "z"]).unwrap());
        let a = TensorField::new(c.clone(), vec![Variance::Down], parse_all(&c, &["x*y*z", "sin(x*z)", "exp(y)*x"])).unwrap();
        let dd = exterior_derivative(&exterior_derivative(&a).unwrap()).unwrap();
        assert!(dd.max_abs().unwrap() < 1e-12);
    }

    #[test]
    fn antisymmetrize_is_projection() {
        let c = chart2();
        let t = TensorField::new(c.clone(), vec![Variance::Down; 2], parse_all(&c, &["x", "y^2", "3", "x*y"])).unwrap();
        let a = t.antisymmetrize(&[0, 1]).unwrap();
        let aa = a.antisymmetrize(&[0, 1]).unwrap();
        assert!(a.sub(&aa).unwrap().max_abs().unwrap() < 1e-15);
        a.check_antisymmetric(&[0, 1], 1e-14).unwrap();
        assert!(t.check_antisymmetric(&[0, 1], 1e-14).is_err());
    }

    #[test]
    fn forms_from_increasing_components() {
        let c = Arc::new(Chart::new(&["x", "y", "z"]).unwrap());
        let h = TensorField::form_from_increasing(c.clone(), 3, |_| Expr::constant(2.0));
        assert_eq!(h.get(&[0, 1, 2]).as_const(), Some(2.0));
        assert_eq!(h.get(&[1, 0, 2]).as_const(), Some(-2.0));
        assert_eq!(h.get(&[2, 0, 1]).as_const(), Some(2.0));
        assert!(h.get(&[0, 0, 2]).is_zero());
    }
}
