//! Difference operators in `i` and `j`: the wave equation, the two
//! generalized eigenvalue problems and the recurrences they imply.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::coeffs::{f_closed_auto, CoefficientGrid, EntryFlag, GridFamily, Method};
use crate::error::{Error, Result};
use crate::orthopoly::{ultra_offdiag, RecurrenceFamily, UltraParam};
use crate::quadrature::ultra_offdiag_extended;
use crate::specfun::Expansion;

type Coefficient = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// `(S v)_n = sub(n) v_{n-1} + main(n) v_n + sup(n) v_{n+1}`, with `v_{-1} = 0`.
#[derive(Clone)]
pub struct TridiagonalStencil {
    sub: Coefficient,
    main: Coefficient,
    sup: Coefficient,
    pub label: &'static str,
}

impl core::fmt::Debug for TridiagonalStencil {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("TridiagonalStencil").field("label", &self.label).finish()
    }
}

impl TridiagonalStencil {
    pub fn new<A, B, C>(label: &'static str, sub: A, main: B, sup: C) -> Self
    where
        A: Fn(usize) -> f64 + Send + Sync + 'static,
        B: Fn(usize) -> f64 + Send + Sync + 'static,
        C: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        TridiagonalStencil { sub: Arc::new(sub), main: Arc::new(main), sup: Arc::new(sup), label }
    }

    pub fn sub(&self, n: usize) -> f64 {
        (self.sub)(n)
    }

    pub fn main(&self, n: usize) -> f64 {
        (self.main)(n)
    }

    pub fn sup(&self, n: usize) -> f64 {
        (self.sup)(n)
    }

    /// `(S v)_n` given the three neighbours, with the terms kept apart.
    pub fn terms(&self, n: usize, prev: f64, cur: f64, next: f64) -> [f64; 3] {
        let s = if n == 0 { 0.0 } else { self.sub(n) * prev };
        [s, self.main(n) * cur, self.sup(n) * next]
    }

    /// `S v` for `n < v.len()`; `v_{len}` is taken as 0.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..v.len())
            .map(|n| {
                let prev = if n == 0 { 0.0 } else { v[n - 1] };
                let next = v.get(n + 1).copied().unwrap_or(0.0);
                self.terms(n, prev, v[n], next).iter().sum()
            })
            .collect()
    }
}

/// A residual together with the largest term that entered it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub value: f64,
    pub scale: f64,
}

impl Residual {
    fn from_terms(lhs: &[f64], rhs: &[f64]) -> Self {
        let l: f64 = lhs.iter().sum();
        let r: f64 = rhs.iter().sum();
        let scale = lhs.iter().chain(rhs).fold(0.0f64, |m, t| m.max(t.abs()));
        Residual { value: l - r, scale }
    }

    /// `|value| / scale`, or `|value|` when every term vanished.
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.value.abs() / self.scale
        } else {
            self.value.abs()
        }
    }
}

/// Kind of relation a residual was measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResidualKind {
    Wave,
    GevpI,
    GevpJ,
}

impl ResidualKind {
    pub fn name(self) -> &'static str {
        match self {
            ResidualKind::Wave => "wave",
            ResidualKind::GevpI => "gevp_i",
            ResidualKind::GevpJ => "gevp_j",
        }
    }
}

/// Where the recurrence coefficients of a wave operator come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaveKind {
    Ultraspherical(UltraParam),
    Mixed(UltraParam, UltraParam),
    /// Arbitrary families; coefficients are only known in double precision.
    General,
}

/// `a_{i+1}u_{i+1,j} + b_i u_{i,j} + a_i u_{i-1,j}
///   = (c_{j+1}u_{i,j+1} + (d_j-β)u_{i,j} + c_j u_{i,j-1})/α`
/// where `(a, b)` and `(c, d)` are the recurrence coefficients of `P` and `Q`.
#[derive(Debug, Clone)]
pub struct WaveOperator {
    pub p: RecurrenceFamily,
    pub q: RecurrenceFamily,
    pub alpha: f64,
    pub beta: f64,
    pub family: GridFamily,
    pub kind: WaveKind,
}

impl WaveOperator {
    /// The relation satisfied by `f^{(λ)}_{i,j}`: `P = Q` ultraspherical, `α = 2`, `β = -1`.
    pub fn ultraspherical(lambda: UltraParam) -> Self {
        let fam = RecurrenceFamily::ultraspherical(lambda);
        WaveOperator {
            p: fam.clone(),
            q: fam,
            alpha: 2.0,
            beta: -1.0,
            family: GridFamily::Same { lambda: lambda.value() },
            kind: WaveKind::Ultraspherical(lambda),
        }
    }

    /// The relation satisfied by `f^{(λ,μ)}_{i,j}` (same argument, `α = 1`, `β = 0`).
    pub fn mixed(lambda: UltraParam, mu: UltraParam) -> Self {
        WaveOperator {
            p: RecurrenceFamily::ultraspherical(lambda),
            q: RecurrenceFamily::ultraspherical(mu),
            alpha: 1.0,
            beta: 0.0,
            family: GridFamily::Mixed { lambda: lambda.value(), mu: mu.value() },
            kind: WaveKind::Mixed(lambda, mu),
        }
    }

    /// `(λ, μ) = (1/2, 3/2)`.
    pub fn geronimus() -> Self {
        WaveOperator::mixed(UltraParam::new(0.5).expect("valid"), UltraParam::new(1.5).expect("valid"))
    }

    /// Any pair of families.
    pub fn general(p: RecurrenceFamily, q: RecurrenceFamily, alpha: f64, beta: f64) -> Result<Self> {
        if alpha == 0.0 || !alpha.is_finite() {
            return Err(Error::Domain { what: "alpha must be finite and nonzero", value: alpha });
        }
        Ok(WaveOperator { p, q, alpha, beta, family: GridFamily::General, kind: WaveKind::General })
    }

    fn terms(&self, u: &CoefficientGrid, i: usize, j: usize) -> ([f64; 3], [f64; 3]) {
        let (ii, jj) = (i as isize, j as isize);
        let lhs = [
            self.p.offdiag(i + 1) * u.get_or_zero(ii + 1, jj),
            self.p.diag(i) * u.get_or_zero(ii, jj),
            self.p.offdiag(i) * u.get_or_zero(ii - 1, jj),
        ];
        let rhs = [
            self.q.offdiag(j + 1) * u.get_or_zero(ii, jj + 1) / self.alpha,
            (self.q.diag(j) - self.beta) * u.get_or_zero(ii, jj) / self.alpha,
            self.q.offdiag(j) * u.get_or_zero(ii, jj - 1) / self.alpha,
        ];
        (lhs, rhs)
    }

    fn p_offdiag_ext(&self, n: usize) -> Expansion {
        match self.kind {
            WaveKind::Ultraspherical(l) | WaveKind::Mixed(l, _) => ultra_offdiag_extended(l, n),
            WaveKind::General => Expansion::new(self.p.offdiag(n)),
        }
    }

    fn q_offdiag_ext(&self, n: usize) -> Expansion {
        match self.kind {
            WaveKind::Ultraspherical(l) | WaveKind::Mixed(_, l) => ultra_offdiag_extended(l, n),
            WaveKind::General => Expansion::new(self.q.offdiag(n)),
        }
    }

    fn p_diag_ext(&self, n: usize) -> Expansion {
        match self.kind {
            WaveKind::General => Expansion::new(self.p.diag(n)),
            _ => Expansion::ZERO,
        }
    }

    fn q_diag_ext(&self, n: usize) -> Expansion {
        match self.kind {
            WaveKind::General => Expansion::new(self.q.diag(n)),
            _ => Expansion::ZERO,
        }
    }
}

/// Initial data `u_{·,0}` for a wave operator.
#[derive(Debug, Clone)]
pub struct WaveSystem {
    pub operator: WaveOperator,
    pub initial_row: Vec<Expansion>,
}

impl WaveSystem {
    pub fn new(operator: WaveOperator, initial_row: &[f64]) -> Self {
        WaveSystem { operator, initial_row: initial_row.iter().map(|&v| Expansion::new(v)).collect() }
    }
}

/// LHS − RHS of the wave equation at `(i, j)`.
pub fn wave_residual(grid: &CoefficientGrid, op: &WaveOperator, i: usize, j: usize) -> Result<Residual> {
    if i + 1 > grid.imax || j + 1 > grid.jmax {
        return Err(Error::IndexOutOfGrid { i, j });
    }
    let (lhs, rhs) = op.terms(grid, i, j);
    Ok(Residual::from_terms(&lhs, &rhs))
}

/// March the wave equation in `j`. Row `j` is defined for `i ≤ N-1-j`, where
/// `N` is the length of the initial row; entries beyond are flagged undefined.
///
/// Each step amplifies perturbations roughly fivefold, so the march runs in
/// extended precision. Only exact initial data and coefficients (the
/// ultraspherical kinds) keep twenty or more rows accurate.
pub fn wave_simulate(system: &WaveSystem, rows: usize) -> Result<CoefficientGrid> {
    let n = system.initial_row.len();
    if n < rows + 1 {
        return Err(Error::Domain { what: "initial row shorter than rows + 1", value: n as f64 });
    }
    let op = &system.operator;
    let alpha = Expansion::new(op.alpha);
    let beta = Expansion::new(op.beta);
    let a: Vec<Expansion> = (0..=n).map(|k| op.p_offdiag_ext(k)).collect();
    let b: Vec<Expansion> = (0..n).map(|k| op.p_diag_ext(k)).collect();
    let mut prev = vec![Expansion::ZERO; n];
    let mut cur = system.initial_row.clone();
    let mut g = CoefficientGrid::zeros(op.family, n - 1, rows, Method::WaveStep);
    for (i, v) in cur.iter().enumerate() {
        g.set(i, 0, v.to_f64());
    }
    for j in 0..rows {
        let lead = op.q_offdiag_ext(j + 1);
        if lead.is_zero() || !lead.hi().is_finite() {
            return Err(Error::ZeroLeadingCoefficient { index: j + 1 });
        }
        let (cj, dj) = (op.q_offdiag_ext(j), op.q_diag_ext(j));
        let last = n - 2 - j;
        let mut next = vec![Expansion::ZERO; n];
        for i in 0..=last {
            let below = if i == 0 { Expansion::ZERO } else { a[i] * cur[i - 1] };
            let lhs = a[i + 1] * cur[i + 1] + b[i] * cur[i] + below;
            next[i] = (alpha * lhs - (dj - beta) * cur[i] - cj * prev[i]) / lead;
            g.set(i, j + 1, next[i].to_f64());
        }
        for i in last + 1..n {
            g.set_flag(i, j + 1, EntryFlag::Undefined);
        }
        prev = cur;
        cur = next;
    }
    Ok(g)
}

/// Simulate `f^{(λ)}` rows from a given `f_{·,0}`.
pub fn simulate_ultraspherical(lambda: UltraParam, initial_row: &[Expansion], rows: usize) -> Result<CoefficientGrid> {
    let system = WaveSystem { operator: WaveOperator::ultraspherical(lambda), initial_row: initial_row.to_vec() };
    wave_simulate(&system, rows)
}

/// `√((i+2λ)/((i+1)(i+λ+1)(i+λ)))`.
pub fn s_plus(lambda: f64, i: usize) -> f64 {
    let x = i as f64;
    libm::sqrt((x + 2.0 * lambda) / ((x + 1.0) * (x + lambda + 1.0) * (x + lambda)))
}

/// `√(i/((i-1+λ)(i-1+2λ)(i+λ)))`, zero at `i = 0`.
pub fn s_minus(lambda: f64, i: usize) -> f64 {
    if i == 0 {
        return 0.0;
    }
    let x = i as f64;
    libm::sqrt(x / ((x - 1.0 + lambda) * (x - 1.0 + 2.0 * lambda) * (x + lambda)))
}

/// `A_i`, acting on the `i` index.
pub fn stencil_a_i(lambda: f64) -> TridiagonalStencil {
    TridiagonalStencil::new(
        "A_i",
        move |i| 2.0 * (i as f64 + lambda - 1.5) * s_minus(lambda, i),
        |_| 0.0,
        move |i| 2.0 * (i as f64 + lambda + 1.5) * s_plus(lambda, i),
    )
}

/// `B_i = 4I + ...`.
pub fn stencil_b_i(lambda: f64) -> TridiagonalStencil {
    TridiagonalStencil::new(
        "B_i",
        move |i| 2.0 * (i as f64 + lambda + 0.5) * s_minus(lambda, i),
        |_| 4.0,
        move |i| 2.0 * (i as f64 + lambda - 0.5) * s_plus(lambda, i),
    )
}

/// `(n+λ-1/2)(n+λ+1/2)`.
pub fn eigen_factor(lambda: f64, n: usize) -> f64 {
    let x = n as f64 + lambda;
    (x - 0.5) * (x + 0.5)
}

/// `(i+λ-1/2)(i+λ+1/2) A_i f − (j+λ-1/2)(j+λ+1/2) B_i f` at `(i, j)`.
pub fn gevp_i_residual(grid: &CoefficientGrid, lambda: UltraParam, i: usize, j: usize) -> Result<Residual> {
    if i + 1 > grid.imax || j > grid.jmax {
        return Err(Error::IndexOutOfGrid { i, j });
    }
    let l = lambda.value();
    let (ii, jj) = (i as isize, j as isize);
    let (prev, cur, next) = (grid.get_or_zero(ii - 1, jj), grid.get(i, j), grid.get(i + 1, j));
    let (ei, ej) = (eigen_factor(l, i), eigen_factor(l, j));
    let a = stencil_a_i(l).terms(i, prev, cur, next).map(|t| ei * t);
    let b = stencil_b_i(l).terms(i, prev, cur, next).map(|t| ej * t);
    Ok(Residual::from_terms(&a, &b))
}

/// `√((j+1)(j+λ+1)/((j+λ)(j+2λ)))`.
pub fn r_plus(lambda: f64, j: usize) -> f64 {
    let y = j as f64;
    libm::sqrt((y + 1.0) * (y + lambda + 1.0) / ((y + lambda) * (y + 2.0 * lambda)))
}

/// `√((j+2λ-1)/(j(j+λ)(j+λ-1)))`; only meaningful for `j ≥ 1`.
pub fn r_minus(lambda: f64, j: usize) -> f64 {
    let y = j as f64;
    libm::sqrt((y + 2.0 * lambda - 1.0) / (y * (y + lambda) * (y + lambda - 1.0)))
}

/// `Â_j = (2j+2λ+1)(2j+2λ-1)[3(j+λ+1) I + (1/2)(j+λ+3/2) r⁺ E₊ + (1/2)(j+λ-3/2)(j+λ+1) r⁻ E₋]`.
pub fn stencil_a_hat(lambda: f64) -> TridiagonalStencil {
    let p = move |j: usize| {
        let y = j as f64 + lambda;
        (2.0 * y + 1.0) * (2.0 * y - 1.0)
    };
    TridiagonalStencil::new(
        "A^_j",
        move |j| {
            let y = j as f64 + lambda;
            p(j) * 0.5 * (y - 1.5) * (y + 1.0) * r_minus(lambda, j)
        },
        move |j| p(j) * 3.0 * (j as f64 + lambda + 1.0),
        move |j| p(j) * 0.5 * (j as f64 + lambda + 1.5) * r_plus(lambda, j),
    )
}

/// `B̂_j = 4(j+λ+1) I + (2j+2λ-1) r⁺ E₊ + (2j+2λ+1)(j+λ+1) r⁻ E₋`.
pub fn stencil_b_hat(lambda: f64) -> TridiagonalStencil {
    TridiagonalStencil::new(
        "B^_j",
        move |j| {
            let y = j as f64 + lambda;
            (2.0 * y + 1.0) * (y + 1.0) * r_minus(lambda, j)
        },
        move |j| 4.0 * (j as f64 + lambda + 1.0),
        move |j| (2.0 * (j as f64 + lambda) - 1.0) * r_plus(lambda, j),
    )
}

/// `Â_j f − (i+λ+1/2)(i+λ-1/2) B̂_j f` at `(i, j)`, for `1 ≤ j < jmax`.
pub fn gevp_j_residual(grid: &CoefficientGrid, lambda: UltraParam, i: usize, j: usize) -> Result<Residual> {
    if j == 0 || j + 1 > grid.jmax || i > grid.imax {
        return Err(Error::IndexOutOfGrid { i, j });
    }
    let l = lambda.value();
    let (prev, cur, next) = (grid.get(i, j - 1), grid.get(i, j), grid.get(i, j + 1));
    let ei = eigen_factor(l, i);
    let a = stencil_a_hat(l).terms(j, prev, cur, next);
    let b = stencil_b_hat(l).terms(j, prev, cur, next).map(|t| ei * t);
    Ok(Residual::from_terms(&a, &b))
}

/// Scalar form `c_j f_{i,j-1} + d_j f_{i,j+1} + e_j f_{i,j} = 0`; returns `(c, d, e)`.
pub fn cde_coefficients(lambda: UltraParam, i: usize, j: usize) -> (f64, f64, f64) {
    let l = lambda.value();
    let (x, y) = (i as f64, j as f64);
    let c = -2.0 * (x + y + 2.0 * l - 1.0) * (x - y + 1.0) * (2.0 * y + 2.0 * l + 1.0) * (y + l + 1.0);
    let d = -4.0
        * (x - y - 1.0)
        * (x + y + 2.0 * l + 1.0)
        * (y + l - 0.5)
        * libm::sqrt(y * (y + 1.0) * (y + l - 1.0) * (y + l + 1.0) / ((y + 2.0 * l - 1.0) * (y + 2.0 * l)));
    let root = libm::sqrt(y * (y + l) * (y + l - 1.0) / (y + 2.0 * l - 1.0));
    let e = -2.0 * (2.0 * x + 2.0 * l + 1.0) * (2.0 * x + 2.0 * l - 1.0) * (y + l + 1.0) * root
        + 6.0 * (2.0 * y + 2.0 * l - 1.0) * (2.0 * y + 2.0 * l + 1.0) * (y + l + 1.0) * root;
    (c, d, e)
}

/// Largest gap between `A_i - B_i` taken entrywise and `-4I + 4s⁺E₊ - 4s⁻E₋`.
pub fn operator_difference_check(lambda: UltraParam, i: usize) -> f64 {
    let l = lambda.value();
    let (a, b) = (stencil_a_i(l), stencil_b_i(l));
    let sub = (a.sub(i) - b.sub(i)) - (-4.0 * s_minus(l, i));
    let main = (a.main(i) - b.main(i)) - (-4.0);
    let sup = (a.sup(i) - b.sup(i)) - 4.0 * s_plus(l, i);
    sub.abs().max(main.abs()).max(sup.abs())
}

/// `(i±1)(i±1+2λ)·2(i+λ∓1/2) − i(i+2λ)·2(i+λ±3/2) ∓ 4(λ²−1/4)`; zero identically.
pub fn gevp_i_identity(lambda: f64, i: f64, upper: bool) -> f64 {
    let s = if upper { 1.0 } else { -1.0 };
    let k = i + s;
    k * (k + 2.0 * lambda) * 2.0 * (i + lambda - s * 0.5) - i * (i + 2.0 * lambda) * 2.0 * (i + lambda + s * 1.5)
        - s * 4.0 * (lambda * lambda - 0.25)
}

/// `(i+j+2λ∓1)(i−j±1) − [(i+λ+1/2)(i+λ−1/2) − (j+λ∓1/2)(j+λ∓3/2)]`; zero identically.
pub fn gevp_j_identity(lambda: f64, i: f64, j: f64, upper: bool) -> f64 {
    let s = if upper { 1.0 } else { -1.0 };
    (i + j + 2.0 * lambda - s) * (i - j + s)
        - ((i + lambda + 0.5) * (i + lambda - 0.5) - (j + lambda - s * 0.5) * (j + lambda - s * 1.5))
}

/// `(a, b, c)` with `a f_{i+1,j} + b f_{i,j} + c f_{i-1,j} = 0`.
pub fn i_recurrence_coefficients(lambda: f64, i: usize, j: usize) -> (f64, f64, f64) {
    let x = i as f64 + lambda;
    let ej = eigen_factor(lambda, j);
    let a = 2.0 * s_plus(lambda, i) * (x - 0.5) * ((x + 0.5) * (x + 1.5) - ej);
    let b = -4.0 * ej;
    let c = 2.0 * s_minus(lambda, i) * ((x - 0.5) * (x + 0.5) * (x - 1.5) - ej * (x + 0.5));
    (a, b, c)
}

/// Column `f_{0..=imax, j}` by the three-term recurrence in `i`, seeded at the
/// diagonal with `f_{j-1,j} = 0`. For `λ = 1/2, j = 0` both `f_{0,0}` and
/// `f_{1,0}` are seeded, since the step out of `i = 0` degenerates there.
pub fn propagate_i(lambda: UltraParam, j: usize, imax: usize) -> Result<Vec<f64>> {
    let l = lambda.value();
    let mut f = vec![0.0; imax + 1];
    if j > imax {
        return Ok(f);
    }
    f[j] = f_closed_auto(lambda, j, j)?.to_real();
    let mut start = j;
    if j == 0 && l == 0.5 && imax >= 1 {
        f[1] = f_closed_auto(lambda, 1, 0)?.to_real();
        start = 1;
    }
    for i in start..imax {
        let (a, b, c) = i_recurrence_coefficients(l, i, j);
        if a == 0.0 {
            return Err(Error::ZeroLeadingCoefficient { index: i });
        }
        let prev = if i == 0 { 0.0 } else { f[i - 1] };
        f[i + 1] = -(b * f[i] + c * prev) / a;
    }
    Ok(f)
}

/// `(sub, main, sup)` of `Â_j − (i+λ+1/2)(i+λ−1/2) B̂_j` at `(i, j)`.
pub fn j_recurrence_coefficients(lambda: f64, i: usize, j: usize) -> (f64, f64, f64) {
    let (a, b) = (stencil_a_hat(lambda), stencil_b_hat(lambda));
    let e = eigen_factor(lambda, i);
    (a.sub(j) - e * b.sub(j), a.main(j) - e * b.main(j), a.sup(j) - e * b.sup(j))
}

/// Row `f_{i, 0..=jmax}` by the recurrence in `j`, run downward from
/// `f_{i,i+1} = 0` and `f_{i,i}`.
pub fn propagate_j(lambda: UltraParam, i: usize, jmax: usize) -> Result<Vec<f64>> {
    let l = lambda.value();
    let mut f = vec![0.0; i + 2];
    f[i] = f_closed_auto(lambda, i, i)?.to_real();
    for j in (1..=i).rev() {
        let (sub, main, sup) = j_recurrence_coefficients(l, i, j);
        if sub == 0.0 || !sub.is_finite() {
            return Err(Error::ZeroLeadingCoefficient { index: j });
        }
        f[j - 1] = -(main * f[j] + sup * f[j + 1]) / sub;
    }
    f.resize(jmax + 1, 0.0);
    Ok(f)
}

/// Sum of squares of the defined entries of row `j`.
pub fn row_energy(grid: &CoefficientGrid, j: usize) -> f64 {
    crate::specfun::compensated_sum(
        (0..=grid.imax).filter(|&i| grid.flag(i, j) != EntryFlag::Undefined).map(|i| { let v = grid.get(i, j); v * v }),
    )
}

/// Smallest `i` with `|u_{i,j}| > threshold`.
pub fn wavefront(grid: &CoefficientGrid, j: usize, threshold: f64) -> Option<usize> {
    (0..=grid.imax).find(|&i| grid.flag(i, j) != EntryFlag::Undefined && grid.get(i, j).abs() > threshold)
}

/// Lagged offdiagonal used in the wave equation at `λ = 1/2`: `(i+1)/√((2i+1)(2i+3))`.
pub fn legendre_offdiag(i: usize) -> f64 {
    let x = i as f64;
    (x + 1.0) / libm::sqrt((2.0 * x + 1.0) * (2.0 * x + 3.0))
}

/// `a_n` for the ultraspherical family; re-exported for stencil users.
pub fn wave_offdiag(lambda: UltraParam, n: usize) -> f64 {
    ultra_offdiag(lambda, n)
}
