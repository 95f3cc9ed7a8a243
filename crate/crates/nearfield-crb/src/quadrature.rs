//! Deterministic two-dimensional quadrature over rectangles.
//!
//! The default engine is a tensor-product Gauss-Legendre rule applied on a
//! grid of panels. Each panel carries a refinement estimate
//! $|Q_{\text{children}} - Q_{\text{panel}}|$; the panel with the largest
//! estimate is bisected in both directions until the summed estimate falls
//! below the requested relative tolerance. Ties are broken by creation
//! order and the final sum runs over panels in creation order, so results
//! are bit-identical for a fixed specification.
//!
//! The midpoint rule on the Riemann grid mirrors the cell construction used
//! to discretise the overall scalar field.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CrbError, Result};
use crate::geometry::SurfaceGeometry;

/// Closed rectangle $[u_{min}, u_{max}] \times [v_{min}, v_{max}]$.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectDomain {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl RectDomain {
    pub fn new(u_min: f64, u_max: f64, v_min: f64, v_max: f64) -> Result<Self> {
        if !(u_min < u_max && v_min < v_max) || ![u_min, u_max, v_min, v_max].iter().all(|b| b.is_finite()) {
            return Err(CrbError::domain(format!(
                "degenerate rectangle [{u_min}, {u_max}] x [{v_min}, {v_max}]"
            )));
        }
        Ok(Self { u_min, u_max, v_min, v_max })
    }

    /// Square $[-h, h]^2$.
    pub fn centered(half: f64) -> Result<Self> {
        Self::new(-half, half, -half, half)
    }

    /// Normalised CPL domain $R_\tau = \{|u|, |v| \le \tau/\sqrt 8\}$.
    pub fn r_tau(tau: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(CrbError::domain(format!("tau must be positive, got {tau}")));
        }
        Self::centered(tau / 8f64.sqrt())
    }

    /// Physical aperture $R_r$.
    pub fn aperture(geom: &SurfaceGeometry) -> Self {
        let h = geom.half_side();
        Self { u_min: -h, u_max: h, v_min: -h, v_max: h }
    }

    pub fn area(&self) -> f64 {
        (self.u_max - self.u_min) * (self.v_max - self.v_min)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            u_min: self.u_min * s,
            u_max: self.u_max * s,
            v_min: self.v_min * s,
            v_max: self.v_max * s,
        }
    }

    /// Splits into an `nu` by `nv` grid, row-major in `v`.
    pub fn split(&self, nu: usize, nv: usize) -> Vec<RectDomain> {
        let du = (self.u_max - self.u_min) / nu as f64;
        let dv = (self.v_max - self.v_min) / nv as f64;
        let mut out = Vec::with_capacity(nu * nv);
        for j in 0..nv {
            let v0 = if j == 0 { self.v_min } else { self.v_min + j as f64 * dv };
            let v1 = if j + 1 == nv { self.v_max } else { self.v_min + (j + 1) as f64 * dv };
            for i in 0..nu {
                let u0 = if i == 0 { self.u_min } else { self.u_min + i as f64 * du };
                let u1 = if i + 1 == nu { self.u_max } else { self.u_min + (i + 1) as f64 * du };
                out.push(RectDomain { u_min: u0, u_max: u1, v_min: v0, v_max: v1 });
            }
        }
        out
    }

    fn quarters(&self) -> [RectDomain; 4] {
        let um = 0.5 * (self.u_min + self.u_max);
        let vm = 0.5 * (self.v_min + self.v_max);
        [
            RectDomain { u_min: self.u_min, u_max: um, v_min: self.v_min, v_max: vm },
            RectDomain { u_min: um, u_max: self.u_max, v_min: self.v_min, v_max: vm },
            RectDomain { u_min: self.u_min, u_max: um, v_min: vm, v_max: self.v_max },
            RectDomain { u_min: um, u_max: self.u_max, v_min: vm, v_max: self.v_max },
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Rule {
    TensorGauss { order: usize },
    RiemannMidpoint { cells: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rule: Rule,
    /// Initial panels per axis.
    pub panels: usize,
    /// Target relative tolerance of the refinement estimate.
    pub tol: f64,
    /// Cap on the number of leaf panels.
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rule: Rule::TensorGauss { order: 32 },
            panels: 4,
            tol: 1e-10,
            max_panels: 200_000,
        }
    }
}

impl QuadratureSpec {
    pub fn gauss(order: usize, panels: usize, tol: f64) -> Result<Self> {
        let s = Self { rule: Rule::TensorGauss { order }, panels, tol, ..Self::default() };
        s.validate()?;
        Ok(s)
    }

    pub fn riemann(cells: usize) -> Result<Self> {
        let s = Self { rule: Rule::RiemannMidpoint { cells }, ..Self::default() };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self.rule {
            Rule::TensorGauss { order } if order < 2 => {
                return Err(CrbError::config(format!("gauss order must be at least 2, got {order}")))
            }
            Rule::RiemannMidpoint { cells } if cells < 1 => {
                return Err(CrbError::config("riemann cell count must be positive"))
            }
            _ => {}
        }
        if !(self.tol > 0.0) {
            return Err(CrbError::config(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.panels < 1 || self.max_panels < self.panels * self.panels {
            return Err(CrbError::config("panel counts are inconsistent"));
        }
        Ok(())
    }
}

/// Values that can be integrated: scalars, complex numbers and fixed vectors.
pub trait QuadValue: Copy + Send + Sync {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn scale(self, s: f64) -> Self;
    /// Largest absolute component, used for tolerances.
    fn max_abs(&self) -> f64;
    fn is_finite(&self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn max_abs(&self) -> f64 {
        self.abs()
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn max_abs(&self) -> f64 {
        self.re.abs().max(self.im.abs())
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl<const N: usize> QuadValue for [f64; N] {
    fn zero() -> Self {
        [0.0; N]
    }
    fn add(mut self, other: Self) -> Self {
        for (a, b) in self.iter_mut().zip(other) {
            *a += b;
        }
        self
    }
    fn scale(mut self, s: f64) -> Self {
        for a in self.iter_mut() {
            *a *= s;
        }
        self
    }
    fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |m, a| m.max(a.abs()))
    }
    fn is_finite(&self) -> bool {
        self.iter().all(|a| a.is_finite())
    }
}

/// Result of a quadrature with its refinement error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error: f64,
    pub panels: usize,
    pub converged: bool,
}

/// Gauss-Legendre nodes and weights on $[-1, 1]$.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = (n + 1) / 2;
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn panel_sum<T: QuadValue, F: Fn(f64, f64) -> T>(f: &F, d: &RectDomain, gl: &GaussLegendre) -> Result<T> {
    let hu = 0.5 * (d.u_max - d.u_min);
    let hv = 0.5 * (d.v_max - d.v_min);
    let cu = 0.5 * (d.u_max + d.u_min);
    let cv = 0.5 * (d.v_max + d.v_min);
    let mut acc = T::zero();
    for (yj, wj) in gl.nodes.iter().zip(&gl.weights) {
        let v = cv + hv * yj;
        let mut row = T::zero();
        for (xi, wi) in gl.nodes.iter().zip(&gl.weights) {
            let u = cu + hu * xi;
            let val = f(u, v);
            if !val.is_finite() {
                return Err(CrbError::Numerical {
                    message: "non-finite integrand sample".into(),
                    location: Some((u, v)),
                });
            }
            row = row.add(val.scale(*wi));
        }
        acc = acc.add(row.scale(*wj));
    }
    Ok(acc.scale(hu * hv))
}

struct Node<T> {
    dom: RectDomain,
    kids: [T; 4],
    value: T,
    err: f64,
}

fn make_node<T: QuadValue, F: Fn(f64, f64) -> T>(
    f: &F,
    dom: RectDomain,
    coarse: T,
    gl: &GaussLegendre,
) -> Result<Node<T>> {
    let q = dom.quarters();
    let kids = [
        panel_sum(f, &q[0], gl)?,
        panel_sum(f, &q[1], gl)?,
        panel_sum(f, &q[2], gl)?,
        panel_sum(f, &q[3], gl)?,
    ];
    let value = kids[0].add(kids[1]).add(kids[2]).add(kids[3]);
    let err = value.add(coarse.scale(-1.0)).max_abs();
    Ok(Node { dom, kids, value, err })
}

#[derive(PartialEq)]
struct HeapKey {
    err: f64,
    id: usize,
}

impl Eq for HeapKey {}

impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then_with(|| other.id.cmp(&self.id))
    }
}

impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Integrates `f(u, v)` over `dom`.
pub fn integrate_2d<T, F>(f: F, dom: &RectDomain, spec: &QuadratureSpec) -> Result<Integral<T>>
where
    T: QuadValue,
    F: Fn(f64, f64) -> T,
{
    spec.validate()?;
    match spec.rule {
        Rule::TensorGauss { order } => adaptive_gauss(&f, dom, spec, &GaussLegendre::new(order)),
        Rule::RiemannMidpoint { cells } => {
            let fine = midpoint(&f, dom, cells)?;
            let finer = midpoint(&f, dom, 2 * cells)?;
            let error = finer.add(fine.scale(-1.0)).max_abs() * 4.0 / 3.0;
            Ok(Integral { value: fine, error, panels: cells * cells, converged: true })
        }
    }
}

fn midpoint<T: QuadValue, F: Fn(f64, f64) -> T>(f: &F, dom: &RectDomain, n: usize) -> Result<T> {
    let hu = (dom.u_max - dom.u_min) / n as f64;
    let hv = (dom.v_max - dom.v_min) / n as f64;
    let cu = 0.5 * (dom.u_min + dom.u_max);
    let cv = 0.5 * (dom.v_min + dom.v_max);
    let off = (n as f64 + 1.0) / 2.0;
    let mut acc = T::zero();
    for j in 1..=n {
        let v = cv + (j as f64 - off) * hv;
        for i in 1..=n {
            let u = cu + (i as f64 - off) * hu;
            let val = f(u, v);
            if !val.is_finite() {
                return Err(CrbError::Numerical {
                    message: "non-finite integrand sample".into(),
                    location: Some((u, v)),
                });
            }
            acc = acc.add(val);
        }
    }
    Ok(acc.scale(hu * hv))
}

fn adaptive_gauss<T, F>(f: &F, dom: &RectDomain, spec: &QuadratureSpec, gl: &GaussLegendre) -> Result<Integral<T>>
where
    T: QuadValue,
    F: Fn(f64, f64) -> T,
{
    let mut nodes: Vec<Option<Node<T>>> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut total = T::zero();
    let mut mass = 0.0;
    let mut err_sum = 0.0;
    let mut leaves = 0usize;

    for d in dom.split(spec.panels, spec.panels) {
        let coarse = panel_sum(f, &d, gl)?;
        let n = make_node(f, d, coarse, gl)?;
        total = total.add(n.value);
        mass += n.value.max_abs();
        err_sum += n.err;
        heap.push(HeapKey { err: n.err, id: nodes.len() });
        nodes.push(Some(n));
        leaves += 1;
    }

    let mut converged = true;
    loop {
        let floor = 64.0 * f64::EPSILON * mass;
        if err_sum <= spec.tol * total.max_abs() || err_sum <= floor {
            break;
        }
        if leaves + 3 > spec.max_panels {
            converged = false;
            break;
        }
        let Some(top) = heap.pop() else { break };
        let parent = nodes[top.id].take().expect("heap refers to live panel");
        total = total.add(parent.value.scale(-1.0));
        mass -= parent.value.max_abs();
        err_sum -= parent.err;
        leaves -= 1;
        for (q, coarse) in parent.dom.quarters().into_iter().zip(parent.kids) {
            let n = make_node(f, q, coarse, gl)?;
            total = total.add(n.value);
            mass += n.value.max_abs();
            err_sum += n.err;
            heap.push(HeapKey { err: n.err, id: nodes.len() });
            nodes.push(Some(n));
            leaves += 1;
        }
    }

    let mut value = T::zero();
    let mut err = 0.0;
    let mut abs_mass = 0.0;
    for n in nodes.iter().flatten() {
        value = value.add(n.value);
        err += n.err;
        abs_mass += n.value.max_abs();
    }
    Ok(Integral {
        value,
        error: err.max(64.0 * f64::EPSILON * abs_mass),
        panels: leaves,
        converged,
    })
}

/// Cell centres of an $\sqrt\alpha \times \sqrt\alpha$ midpoint grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub cell_area: f64,
}

impl RiemannGrid {
    /// All `(x_i, y_j, cell area)` triples, `x` fastest.
    pub fn points(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.xs.len() * self.ys.len());
        for &y in &self.ys {
            for &x in &self.xs {
                out.push((x, y, self.cell_area));
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.xs.len() * self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Returns $\sqrt\alpha$, requiring it to be a positive odd integer.
pub fn grid_side(alpha: usize) -> Result<usize> {
    let m = (alpha as f64).sqrt().round() as usize;
    if alpha == 0 || m * m != alpha {
        return Err(CrbError::config(format!("riemann alpha {alpha} is not a perfect square")));
    }
    if m % 2 == 0 {
        return Err(CrbError::config(format!("sqrt(alpha) = {m} must be odd")));
    }
    Ok(m)
}

fn centres(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    let h = (hi - lo) / m as f64;
    let c = 0.5 * (lo + hi);
    let off = (m as f64 + 1.0) / 2.0;
    (1..=m).map(|i| c + (i as f64 - off) * h).collect()
}

/// Riemann grid over an arbitrary rectangle.
pub fn riemann_grid_rect(dom: &RectDomain, alpha: usize) -> Result<RiemannGrid> {
    let m = grid_side(alpha)?;
    Ok(RiemannGrid {
        xs: centres(dom.u_min, dom.u_max, m),
        ys: centres(dom.v_min, dom.v_max, m),
        cell_area: dom.area() / alpha as f64,
    })
}

/// Riemann grid over the aperture: spacing $D_r/\sqrt{2\alpha}$, cell area $D_r^2/(2\alpha)$.
pub fn riemann_grid(geom: &SurfaceGeometry, alpha: usize) -> Result<RiemannGrid> {
    let mut g = riemann_grid_rect(&RectDomain::aperture(geom), alpha)?;
    g.cell_area = geom.area() / alpha as f64;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gauss_rule_integrates_polynomials() {
        let gl = GaussLegendre::new(32);
        let s: f64 = gl.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m62: f64 = gl.nodes.iter().zip(&gl.weights).map(|(x, w)| w * x.powi(62)).sum();
        assert!((m62 - 2.0 / 63.0).abs() < 1e-14);
        let gl2 = GaussLegendre::new(2);
        assert!((gl2.nodes[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn constant_over_r_tau() {
        let d = RectDomain::r_tau(0.5).unwrap();
        let r = integrate_2d(|_, _| 1.0, &d, &QuadratureSpec::default()).unwrap();
        assert!((r.value - 0.125).abs() < 1e-15);
    }

    #[test]
    fn polynomial_exactness_low_order() {
        let d = RectDomain::centered(1.0).unwrap();
        let spec = QuadratureSpec::gauss(2, 1, 1e-10).unwrap();
        let r = integrate_2d(|u, v| u * u * v * v, &d, &spec).unwrap();
        assert!((r.value - 4.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn rho12z_small_tau() {
        let f = |u: f64, v: f64| {
            let s = u * u + v * v + 1.0;
            (v.powi(4) + u * u * v * v + 1.0) / s.powi(4)
        };
        let r = integrate_2d(f, &RectDomain::r_tau(0.1).unwrap(), &QuadratureSpec::default()).unwrap();
        assert!((r.value - 0.0049834).abs() < 1e-6, "{}", r.value);
    }

    #[test]
    fn non_finite_sample_reports_location() {
        let d = RectDomain::centered(1.0).unwrap();
        let err = integrate_2d(|u, _| if u > 0.5 { f64::NAN } else { 1.0 }, &d, &QuadratureSpec::default()).unwrap_err();
        match err {
            CrbError::Numerical { location: Some((u, _)), .. } => assert!(u > 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn complex_and_vector_values() {
        let d = RectDomain::new(0.0, 1.0, 0.0, 2.0).unwrap();
        let spec = QuadratureSpec::default();
        let c = integrate_2d(|u, v| Complex64::new(u, v), &d, &spec).unwrap();
        assert!((c.value - Complex64::new(1.0, 2.0)).norm() < 1e-14);
        let a = integrate_2d(|u, v| [u, v, 1.0], &d, &spec).unwrap();
        assert!((a.value[0] - 1.0).abs() < 1e-14 && (a.value[1] - 2.0).abs() < 1e-14 && (a.value[2] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn peaked_integrand_on_wide_domain() {
        // Integral of 1/(1+u^2+v^2)^2 over the plane is pi.
        let d = RectDomain::centered(2e4).unwrap();
        let r = integrate_2d(|u, v| 1.0 / (1.0 + u * u + v * v).powi(2), &d, &QuadratureSpec::default()).unwrap();
        assert!(r.converged);
        let tail = std::f64::consts::PI - r.value;
        assert!(tail > 0.0 && tail < 1e-7, "{tail}");
    }

    #[test]
    fn riemann_midpoint_rule() {
        let d = RectDomain::centered(1.0).unwrap();
        let r = integrate_2d(|u, v| u * u + v, &d, &QuadratureSpec::riemann(101).unwrap()).unwrap();
        assert!((r.value - 4.0 / 3.0).abs() < 1e-3);
        assert!(r.error > 0.0 && r.error < 1e-3);
    }

    #[test]
    fn riemann_grid_examples() {
        let g = riemann_grid(&SurfaceGeometry::new(2.0).unwrap(), 1).unwrap();
        assert_eq!(g.points(), vec![(0.0, 0.0, 2.0)]);
        let g = riemann_grid(&SurfaceGeometry::new(2f64.sqrt()).unwrap(), 9).unwrap();
        for (x, e) in g.xs.iter().zip([-1.0 / 3.0, 0.0, 1.0 / 3.0]) {
            assert!((x - e).abs() < 1e-15);
        }
        assert!((g.cell_area * 9.0 - 1.0).abs() < 1e-15);
        assert!(grid_side(4).is_err());
        assert!(grid_side(10).is_err());
        assert_eq!(grid_side(201 * 201).unwrap(), 201);
    }

    #[test]
    fn grid_first_centre() {
        let d = 3.0;
        let alpha = 101 * 101;
        let g = riemann_grid(&SurfaceGeometry::new(d).unwrap(), alpha).unwrap();
        let x1 = d / (2.0 * (2.0 * alpha as f64).sqrt()) - d / (2.0 * 2f64.sqrt());
        assert!((g.xs[0] - x1).abs() < 1e-14);
        let step = d / (2.0 * alpha as f64).sqrt();
        assert!((g.xs[1] - g.xs[0] - step).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn grid_partition_and_symmetry(k in 0usize..60, d in 0.01f64..50.0) {
            let m = 2 * k + 1;
            let geom = SurfaceGeometry::new(d).unwrap();
            let g = riemann_grid(&geom, m * m).unwrap();
            prop_assert!((g.cell_area * g.len() as f64 - geom.area()).abs() <= 1e-12 * geom.area());
            for i in 0..m {
                prop_assert_eq!(g.xs[i], -g.xs[m - 1 - i]);
            }
        }

        #[test]
        fn domain_splitting_invariance(a in 0.1f64..3.0, b in 0.1f64..3.0, c in -1.0f64..1.0,
                                       cut_u in 0.05f64..0.95, cut_v in 0.05f64..0.95) {
            let f = |u: f64, v: f64| (a * u).cos() * (-(b * v).powi(2)).exp() + c * u * v;
            let spec = QuadratureSpec::default();
            let d = RectDomain::new(-1.0, 2.0, -0.5, 1.5).unwrap();
            let whole = integrate_2d(f, &d, &spec).unwrap().value;
            let um = d.u_min + cut_u * (d.u_max - d.u_min);
            let vm = d.v_min + cut_v * (d.v_max - d.v_min);
            let parts = [
                RectDomain::new(d.u_min, um, d.v_min, vm).unwrap(),
                RectDomain::new(um, d.u_max, d.v_min, vm).unwrap(),
                RectDomain::new(d.u_min, um, vm, d.v_max).unwrap(),
                RectDomain::new(um, d.u_max, vm, d.v_max).unwrap(),
            ];
            let sum: f64 = parts.iter().map(|p| integrate_2d(f, p, &spec).unwrap().value).sum();
            prop_assert!((whole - sum).abs() <= 1e-13 * (1.0 + whole.abs()));
        }
    }

    #[test]
    fn doubling_panels_within_error_estimate() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let trials = 200;
        let mut ok = 0;
        for _ in 0..trials {
            let (a, b, s) = (rng.gen_range(0.2..4.0), rng.gen_range(0.2..4.0), rng.gen_range(0.5..3.0));
            let f = move |u: f64, v: f64| (a * u + b * v).sin() + 1.0 / (s + u * u + v * v);
            let d = RectDomain::new(-2.0, 1.0, -1.0, 2.5).unwrap();
            let base = QuadratureSpec::gauss(8, 2, 1e-8).unwrap();
            let doubled = QuadratureSpec { panels: 4, ..base };
            let r1 = integrate_2d(f, &d, &base).unwrap();
            let r2 = integrate_2d(f, &d, &doubled).unwrap();
            if (r1.value - r2.value).abs() <= r1.error {
                ok += 1;
            }
        }
        assert!(ok as f64 >= 0.95 * trials as f64, "{ok}/{trials}");
    }
}
