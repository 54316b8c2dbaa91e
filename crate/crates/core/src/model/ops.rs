use std::cell::{Cell, RefCell};

use serde::{Deserialize, Serialize};

use super::system::System;
use crate::error::{Error, Result};
use crate::norms::{control_params, sobolev_norm};
use crate::paraproduct::{
    below, lowpassed_coefficients, matvec_pairs, para_highhigh_matvec, para_matvec,
    para_vec_coeff, product_matvec, shellwise_sum, ParaConfig, Quantization, ShellCoefficients,
};
use crate::spectral::{compose, gradient, inverse_transform, transform, Field, GridSpec, Padding, Profile};

fn check_state(sys: &System, u: &Field) -> Result<()> {
    if u.components() != sys.components() {
        return Err(Error::ComponentMismatch { expected: sys.components(), found: u.components() });
    }
    if u.grid().dim() != sys.dim() {
        return Err(Error::ShapeMismatch(format!(
            "system '{}' is {}-dimensional but the grid is {}",
            sys.name(),
            sys.dim(),
            u.grid()
        )));
    }
    Ok(())
}

fn check_pair(sys: &System, u: &Field, v: &Field) -> Result<()> {
    check_state(sys, u)?;
    check_state(sys, v)?;
    u.grid().ensure_same(&v.grid())
}

fn finite(f: Field, what: &str) -> Result<Field> {
    if f.is_finite() {
        Ok(f)
    } else {
        Err(Error::BlowupDetected { time: f64::NAN, reason: format!("non-finite {what}") })
    }
}

/// `A^j(u)` for all `j`, composed on the padded grid and truncated;
/// `dim * m * m` components. Symmetry is audited at every padded point.
pub fn coefficient_field(sys: &System, u: &Field) -> Result<Field> {
    check_state(sys, u)?;
    let worst = Cell::new(0.0f64);
    let a = compose(u, sys.coeff_len(), |state, out| {
        sys.coeff(state, out);
        worst.set(worst.get().max(sys.asymmetry(out)));
    });
    if worst.get() != 0.0 {
        return Err(Error::InvalidSystem(format!(
            "{}: asymmetric coefficients along the state (defect {:e})",
            sys.name(),
            worst.get()
        )));
    }
    finite(a, "coefficients")
}

/// Zeroth-order coefficient `M(u)_{ab} = Σ_j Σ_c [DA^j(u) e_b]_{ac} ∂_j u_c`.
pub fn zeroth_order_field(sys: &System, u: &Field) -> Result<Field> {
    check_state(sys, u)?;
    let (n, m) = (sys.dim(), sys.components());
    let mut parts = vec![u.clone()];
    parts.extend(gradient(u));
    let stacked = Field::stack(&parts)?;
    let scratch = RefCell::new((vec![0.0; m], vec![0.0; sys.coeff_len()]));
    let mf = compose(&stacked, m * m, |s, out| {
        let (state, du) = s.split_at(m);
        let mut guard = scratch.borrow_mut();
        let (e, jac) = &mut *guard;
        out.iter_mut().for_each(|v| *v = 0.0);
        for b in 0..m {
            e.iter_mut().enumerate().for_each(|(i, v)| *v = if i == b { 1.0 } else { 0.0 });
            sys.coeff_jacobian(state, e, jac);
            for j in 0..n {
                for a in 0..m {
                    for c in 0..m {
                        out[a * m + b] += jac[j * m * m + a * m + c] * du[j * m + c];
                    }
                }
            }
        }
    });
    finite(mf, "zeroth-order coefficient")
}

fn block(a: &Field, j: usize, m: usize) -> Field {
    a.slice_components(j * m * m, m * m)
}

/// `N(u) = Σ_j A^j(u) ∂_j u` with dealiased products.
pub fn apply_n(sys: &System, u: &Field) -> Result<Field> {
    let m = sys.components();
    let a = coefficient_field(sys, u)?;
    let grads = gradient(u);
    let mut out = Field::zeros(u.grid(), m);
    for (j, du) in grads.iter().enumerate() {
        out.axpy(1.0, &product_matvec(&block(&a, j, m), du)?);
    }
    finite(out, "nonlinearity")
}

/// Linearization `A^j(u) ∂_j v + M(u) v` of `N` at `u`.
pub fn apply_linearized(sys: &System, u: &Field, v: &Field) -> Result<Field> {
    check_pair(sys, u, v)?;
    let m = sys.components();
    let a = coefficient_field(sys, u)?;
    let mut out = product_matvec(&zeroth_order_field(sys, u)?, v)?;
    for (j, dv) in gradient(v).iter().enumerate() {
        out.axpy(1.0, &product_matvec(&block(&a, j, m), dv)?);
    }
    finite(out, "linearized right-hand side")
}

/// The paradifferential operator `w ↦ Σ_j T_{A^j(u)} ∂_j w + T_{M(u)} w`
/// with `u` frozen. Per-shell coefficients are built once, so repeated
/// applications cost one shell sum each. The zeroth-order term always uses
/// the coefficient low-pass.
pub struct ParadiffOperator {
    grid: GridSpec,
    dim: usize,
    components: usize,
    profile: Profile,
    principal: ShellCoefficients,
    zeroth: Option<ShellCoefficients>,
}

impl ParadiffOperator {
    pub fn new(sys: &System, u: &Field, cfg: &ParaConfig, zeroth_order: bool) -> Result<Self> {
        check_state(sys, u)?;
        cfg.validate()?;
        let grid = u.grid();
        let principal = match cfg.quantization {
            Quantization::CoeffLowpass => {
                lowpassed_coefficients(&transform(&coefficient_field(sys, u)?), cfg.profile, cfg.gap)
            }
            Quantization::ArgLowpass | Quantization::DoubleLowpass => arg_coefficients(sys, u, cfg)?,
        };
        let zeroth = if zeroth_order {
            Some(lowpassed_coefficients(&transform(&zeroth_order_field(sys, u)?), cfg.profile, cfg.gap))
        } else {
            None
        };
        Ok(Self { grid, dim: sys.dim(), components: sys.components(), profile: cfg.profile, principal, zeroth })
    }

    pub fn apply(&self, w: &Field) -> Result<Field> {
        let m = self.components;
        if w.components() != m {
            return Err(Error::ComponentMismatch { expected: m, found: w.components() });
        }
        self.grid.ensure_same(&w.grid())?;
        let high = transform(&Field::stack(&gradient(w))?);
        let pairs: Vec<(usize, usize, usize)> = (0..self.dim)
            .flat_map(|j| {
                (0..m).flat_map(move |a| (0..m).map(move |b| (j * m * m + a * m + b, j * m + b, a)))
            })
            .collect();
        let mut out = shellwise_sum(&high, self.profile, m, &pairs, &self.principal);
        if let Some(zeroth) = &self.zeroth {
            out.axpy(1.0, &shellwise_sum(&transform(w), self.profile, m, &matvec_pairs(m), zeroth));
        }
        finite(out, "paradifferential right-hand side")
    }
}

/// Per-shell `A(u_{<k-gap})`, further low-passed below `k - gap/2` for the
/// double quantization. For `k <= gap` the argument vanishes and the
/// coefficient is the constant `A(0)`.
fn arg_coefficients(sys: &System, u: &Field, cfg: &ParaConfig) -> Result<ShellCoefficients> {
    let grid = u.grid();
    let m = sys.components();
    let pad = Padding::for_grid(grid);
    let radii = grid.wave_norms();
    let uh = transform(u);
    let len = sys.coeff_len();
    let mut at_zero = vec![0.0; len];
    sys.coeff(&vec![0.0; m], &mut at_zero);
    let double = cfg.quantization == Quantization::DoubleLowpass;
    let mut out = Vec::with_capacity(grid.shell_count());
    for k in 0..grid.shell_count() {
        let cut = k as i64 - cfg.gap as i64;
        let coef = if cut <= 0 {
            if at_zero.iter().all(|&v| v == 0.0) {
                out.push(None);
                continue;
            }
            Field::constant(grid, &at_zero)
        } else {
            let mut low = uh.clone();
            for c in 0..m {
                let filtered = below(&grid, cfg.profile, &radii, low.component(c), cut);
                low.component_mut(c).copy_from_slice(&filtered);
            }
            coefficient_field(sys, &inverse_transform(&low))?
        };
        let mut ch = transform(&coef);
        if double {
            let j = k as i64 - cfg.outer_gap() as i64;
            if j <= 0 {
                out.push(None);
                continue;
            }
            for c in 0..len {
                let filtered = below(&grid, cfg.profile, &radii, ch.component(c), j);
                ch.component_mut(c).copy_from_slice(&filtered);
            }
        }
        out.push(Some((0..len).map(|c| pad.to_physical(ch.component(c))).collect()));
    }
    Ok(out)
}

/// Principal paradifferential part `Σ_j T_{A^j(u)} ∂_j w` in the configured
/// quantization.
pub fn paradiff_principal(sys: &System, u: &Field, w: &Field, cfg: &ParaConfig) -> Result<Field> {
    check_pair(sys, u, w)?;
    ParadiffOperator::new(sys, u, cfg, false)?.apply(w)
}

/// Paradifferential right-hand side `Σ_j T_{A^j(u)} ∂_j w + T_{M(u)} w`.
pub fn apply_paradiff(sys: &System, u: &Field, w: &Field, cfg: &ParaConfig) -> Result<Field> {
    apply_paradiff_with(sys, u, w, cfg, true)
}

/// As [`apply_paradiff`], optionally dropping the zeroth-order term.
pub fn apply_paradiff_with(
    sys: &System,
    u: &Field,
    w: &Field,
    cfg: &ParaConfig,
    zeroth_order: bool,
) -> Result<Field> {
    check_pair(sys, u, w)?;
    ParadiffOperator::new(sys, u, cfg, zeroth_order)?.apply(w)
}

/// Perturbative remainder `F(u) = N(u) - paradiff(u, u)`.
pub fn perturbative_f(sys: &System, u: &Field, cfg: &ParaConfig) -> Result<Field> {
    let mut f = apply_n(sys, u)?;
    f.axpy(-1.0, &apply_paradiff(sys, u, u, cfg)?);
    Ok(f)
}

/// `F(u)` summed from its displayed form
/// `Π(A^j(u), ∂_j u) + T_{∂_j u} A^j(u) - T_{M(u)} u`. This agrees with
/// [`perturbative_f`] when the coefficient low-pass quantization is used.
pub fn perturbative_f_displayed(sys: &System, u: &Field, cfg: &ParaConfig) -> Result<Field> {
    check_state(sys, u)?;
    let m = sys.components();
    let a = coefficient_field(sys, u)?;
    let mut out = para_matvec(&zeroth_order_field(sys, u)?, u, cfg)?.scaled(-1.0);
    for (j, du) in gradient(u).iter().enumerate() {
        let aj = block(&a, j, m);
        out.axpy(1.0, &para_highhigh_matvec(&aj, du, cfg)?);
        out.axpy(1.0, &para_vec_coeff(du, &aj, cfg)?);
    }
    Ok(out)
}

/// Parts of `linearized(u) v - paradiff(u, v)`.
#[derive(Clone, Debug)]
pub struct LinearizedRemainder {
    /// Complement `linearized - paradiff - t_part`, the high-high part.
    pub pi_part: Field,
    /// `T_{∂_j v} A^j(u) + T_v M(u)`
    pub t_part: Field,
}

pub fn linearized_remainder(
    sys: &System,
    u: &Field,
    v: &Field,
    cfg: &ParaConfig,
) -> Result<LinearizedRemainder> {
    check_pair(sys, u, v)?;
    let m = sys.components();
    let a = coefficient_field(sys, u)?;
    let mut t_part = para_vec_coeff(v, &zeroth_order_field(sys, u)?, cfg)?;
    for (j, dv) in gradient(v).iter().enumerate() {
        t_part.axpy(1.0, &para_vec_coeff(dv, &block(&a, j, m), cfg)?);
    }
    let mut pi_part = apply_linearized(sys, u, v)?;
    pi_part.axpy(-1.0, &apply_paradiff(sys, u, v, cfg)?);
    pi_part.axpy(-1.0, &t_part);
    Ok(LinearizedRemainder { pi_part, t_part })
}

/// `Π(A^j(u), ∂_j v) + Π(M(u), v)` summed directly.
pub fn linearized_pi_displayed(sys: &System, u: &Field, v: &Field, cfg: &ParaConfig) -> Result<Field> {
    check_pair(sys, u, v)?;
    let m = sys.components();
    let a = coefficient_field(sys, u)?;
    let mut out = para_highhigh_matvec(&zeroth_order_field(sys, u)?, v, cfg)?;
    for (j, dv) in gradient(v).iter().enumerate() {
        out.axpy(1.0, &para_highhigh_matvec(&block(&a, j, m), dv, cfg)?);
    }
    Ok(out)
}

/// Normalized difference bounds for `F`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FDifferenceReport {
    pub sigma: f64,
    /// `‖F(u) - F(v)‖_{H^σ}`
    pub difference: f64,
    /// Difference over `B [‖u-v‖_{H^σ} + ‖u-v‖_{L^∞}(‖u‖_{H^σ} + ‖v‖_{H^σ})]`.
    pub sobolev_ratio: f64,
    /// `‖F(u) - F(v)‖_{L²} / (B ‖u-v‖_{L²})`
    pub l2_ratio: f64,
}

/// `B` is the larger of the two Lipschitz norms.
pub fn f_difference_check(
    sys: &System,
    u: &Field,
    v: &Field,
    sigma: f64,
    cfg: &ParaConfig,
) -> Result<FDifferenceReport> {
    check_pair(sys, u, v)?;
    let df = &perturbative_f(sys, u, cfg)? - &perturbative_f(sys, v, cfg)?;
    let dw = u - v;
    let b = control_params(u).b.max(control_params(v).b);
    let difference = sobolev_norm(&df, sigma);
    let rhs = b * (sobolev_norm(&dw, sigma) + dw.linf_norm() * (sobolev_norm(u, sigma) + sobolev_norm(v, sigma)));
    let ratio = |num: f64, den: f64| if num == 0.0 { 0.0 } else { num / den };
    Ok(FDifferenceReport {
        sigma,
        difference,
        sobolev_ratio: ratio(difference, rhs),
        l2_ratio: ratio(df.l2_norm(), b * dw.l2_norm()),
    })
}
