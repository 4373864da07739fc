//! The Atiyah bundle `E(M,k) = TM ⊕ so(TM)` with metric
//! `⟨X+F, Y+G⟩_k = ⟨X,Y⟩ − k tr(F∘G)`, its operator `H`, and the curvature
//! `R^E` of the connection `∇^E = ∇ + H` (the supra-curvature).
//!
//! Fiber elements are handled in flat coordinates (see [`AtiyahFiber::to_flat`]);
//! every operator below is an `m × m` matrix on those coordinates,
//! skew-adjoint for [`FiberMetric::atiyah`].

use crate::algebra::{atiyah_rank, pair_index, wedge, AtiyahFiber, FiberMetric, FiberVec, Mat, Skew, TangentVec};
use crate::base_geometry::{PointModel, SymmetricSpaceData};
use crate::error::{check_dim, Error, Result};
use crate::scalar::Scalar;
use crate::tables::{DerivTable, PairTable, SecondDerivTable};

#[derive(Clone, Debug, PartialEq)]
pub struct AtiyahSpec<S> {
    pub base: PointModel<S>,
    pub k: S,
}

impl<S: Scalar> AtiyahSpec<S> {
    pub fn new(base: PointModel<S>, k: S) -> Result<Self> {
        if k <= S::zero() {
            return Err(Error::NonPositive { what: "k" });
        }
        Ok(AtiyahSpec { base, k })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn rank(&self) -> usize {
        atiyah_rank(self.dim())
    }

    pub fn metric(&self) -> FiberMetric<S> {
        FiberMetric::atiyah(self.dim(), &self.k)
    }

    /// `¼c(2 − ck)` for a space-form base.
    pub fn space_form_varpi(&self) -> Option<S> {
        match &self.base {
            PointModel::SpaceForm { c, .. } => Some(varpi_space_form(c, &self.k)),
            _ => None,
        }
    }
}

/// `¼c(2 − ck)`.
pub fn varpi_space_form<S: Scalar>(c: &S, k: &S) -> S {
    S::ratio(1, 4) * c.clone() * (S::from_i64(2) - c.clone() * k.clone())
}

/// `½C(2 − kC)`, the coefficient used for surfaces.
pub fn varpi_surface<S: Scalar>(c: &S, k: &S) -> S {
    S::half() * c.clone() * (S::from_i64(2) - k.clone() * c.clone())
}

fn unit<S: Scalar>(n: usize, i: usize) -> Vec<S> {
    let mut v = vec![S::zero(); n];
    v[i] = S::one();
    v
}

/// `E_ij = e_i∧e_j`: the skew matrix with flat coordinate 1 at pair `(i, j)`.
fn skew_unit<S: Scalar>(n: usize, i: usize, j: usize) -> Mat<S> {
    let mut m = Mat::zeros(n, n);
    m.set(i, j, S::one());
    m.set(j, i, -S::one());
    m
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// `H_X` on flat coordinates for the curvature table `table`:
/// `H_X Y = −½R(X,Y)` and `⟨H_X F, Y⟩ = −½k tr(F∘R(X,Y))`.
pub fn h_matrix<S: Scalar>(table: &PairTable<S>, k: &S, x: &[S]) -> Mat<S> {
    let n = table.n();
    let m = atiyah_rank(n);
    let half = S::half();
    let mut out = Mat::zeros(m, m);
    for l in 0..n {
        let r = table.eval(x, &unit(n, l));
        for (p, (i, j)) in pairs(n).enumerate() {
            out.set(n + p, l, -half.clone() * r.get(i, j).clone());
            let tr = r.get(j, i).clone() - r.get(i, j).clone();
            out.set(l, n + p, -half.clone() * k.clone() * tr);
        }
    }
    out
}

/// `Z + F ↦ A Z + [A, F]` on flat coordinates.
pub fn lift_endomorphism<S: Scalar>(a: &Mat<S>) -> Mat<S> {
    let n = a.rows();
    let m = atiyah_rank(n);
    let mut out = Mat::zeros(m, m);
    for r in 0..n {
        for c in 0..n {
            out.set(r, c, a.get(r, c).clone());
        }
    }
    for (q, (a_, b_)) in pairs(n).enumerate() {
        let comm = a.commutator(&skew_unit(n, a_, b_));
        for (p, (i, j)) in pairs(n).enumerate() {
            out.set(n + p, n + q, comm.get(i, j).clone());
        }
    }
    out
}

/// `Z ↦ −½(∇_Z R)(X,Y)` into `so`, completed to a skew-adjoint operator.
fn derivative_block<S: Scalar>(nabla: &[PairTable<S>], k: &S, x: &[S], y: &[S]) -> Mat<S> {
    let n = x.len();
    let m = atiyah_rank(n);
    let two_k = S::from_i64(2) * k.clone();
    let mut out = Mat::zeros(m, m);
    for (l, t) in nabla.iter().enumerate() {
        let d = t.eval(x, y);
        for (p, (i, j)) in pairs(n).enumerate() {
            let v = -S::half() * d.get(i, j).clone();
            if v.is_zero() {
                continue;
            }
            out.set(l, n + p, -two_k.clone() * v.clone());
            out.set(n + p, l, v);
        }
    }
    out
}

/// Supra-curvature table assembled from `R^M` and `∇R^M`:
/// `R^E(X,Y) = R̂(X,Y) + H_Y H_X − H_X H_Y + N(X,Y)` where `R̂` lifts `R^M(X,Y)`
/// to `TM ⊕ so(TM)` and `N` carries `−½(∇_Z R)(X,Y)`.
pub fn assemble_supra<S: Scalar>(k: &S, r: &PairTable<S>, nabla: &DerivTable<S>) -> PairTable<S> {
    let n = r.n();
    let h: Vec<Mat<S>> = (0..n).map(|i| h_matrix(r, k, &unit(n, i))).collect();
    PairTable::from_pairs(n, atiyah_rank(n), |i, j| {
        lift_endomorphism(r.get(i, j))
            .add(&h[j].mul(&h[i]))
            .sub(&h[i].mul(&h[j]))
            .add(&derivative_block(nabla, k, &unit(n, i), &unit(n, j)))
    })
}

/// `∇_W` of the assembled supra-curvature (Levi-Civita part only), by the
/// Leibniz rule applied to [`assemble_supra`].
pub fn assemble_supra_derivative<S: Scalar>(
    k: &S,
    r: &PairTable<S>,
    nabla: &DerivTable<S>,
    nabla2: &SecondDerivTable<S>,
) -> DerivTable<S> {
    let n = r.n();
    let h: Vec<Mat<S>> = (0..n).map(|i| h_matrix(r, k, &unit(n, i))).collect();
    (0..n)
        .map(|w| {
            let rw = &nabla[w];
            let hw: Vec<Mat<S>> = (0..n).map(|i| h_matrix(rw, k, &unit(n, i))).collect();
            PairTable::from_pairs(n, atiyah_rank(n), |i, j| {
                lift_endomorphism(rw.get(i, j))
                    .add(&hw[j].mul(&h[i]))
                    .add(&h[j].mul(&hw[i]))
                    .sub(&hw[i].mul(&h[j]))
                    .sub(&h[i].mul(&hw[j]))
                    .add(&derivative_block(&nabla2[w], k, &unit(n, i), &unit(n, j)))
            })
        })
        .collect()
}

/// `H_X ξ` in flat coordinates.
pub fn h_operator<S: Scalar>(spec: &AtiyahSpec<S>, x: &TangentVec<S>, xi: &FiberVec<S>) -> Result<FiberVec<S>> {
    check_dim(spec.dim(), x.dim())?;
    check_dim(spec.rank(), xi.dim())?;
    let table = spec.base.curvature_table()?;
    Ok(FiberVec::new(h_matrix(&table, &spec.k, &x.coords).apply(&xi.coords)))
}

/// `ε` with `H_X F = ε(k/2)[X, U(F)]` on the given data, if one sign fits all
/// basis inputs. Data coming from an invariant form on `g` whose restriction
/// to `p` is the frame metric always gives `ε = −1`.
pub fn symmetric_h_sign<S: Scalar>(data: &SymmetricSpaceData<S>, tol: f64) -> Option<S> {
    let n = data.dim_p;
    let table = data.curvature_table();
    let one = S::one();
    let mut fits = [true, true];
    for l in 0..n {
        let h = h_matrix(&table, &one, &unit(n, l));
        for (p, (i, j)) in pairs(n).enumerate() {
            let u = data.u_of(&skew_unit(n, i, j));
            let bracket: Vec<S> = data.bracket_kp(&u, &unit(n, l)).into_iter().map(|v| -v).collect();
            for r in 0..n {
                let traced = h.get(r, n + p).clone();
                let closed = S::half() * bracket[r].clone();
                fits[0] &= (traced.clone() - closed.clone()).is_negligible(tol);
                fits[1] &= (traced + closed).is_negligible(tol);
            }
        }
    }
    match fits {
        [true, _] => Some(S::one()),
        [false, true] => Some(-S::one()),
        _ => None,
    }
}

/// Closed-form supra-curvature for the models that have one.
fn closed_form<S: Scalar>(
    base: &PointModel<S>,
    k: &S,
    x: &TangentVec<S>,
    y: &TangentVec<S>,
    xi: &AtiyahFiber<S>,
) -> Result<Option<AtiyahFiber<S>>> {
    let z = &xi.tangent;
    let f = &xi.skew;
    Ok(Some(match base {
        PointModel::SpaceForm { c, .. } => {
            let coeff = S::from_i64(-2) * varpi_space_form(c, k);
            let w = wedge(x, y)?;
            AtiyahFiber { tangent: w.apply(z).scale(&coeff), skew: w.bracket(f).scale(&coeff) }
        }
        PointModel::Surface2D(s) => {
            let varpi = varpi_surface(&s.c, k);
            let w = wedge(x, y)?;
            let z_c = s.grad_c.dot(z);
            let fx_y = f.apply(x).dot(y);
            AtiyahFiber {
                tangent: w.apply(z).scale(&-varpi.clone()).add(&s.grad_c.scale(&(k.clone() * fx_y))),
                skew: w.bracket(f).scale(&-varpi).add(&w.scale(&(S::half() * z_c))),
            }
        }
        PointModel::SymmetricSpace(d) => {
            let Some(eps) = symmetric_h_sign(d, 1e-9) else {
                return Ok(None);
            };
            let quarter_k = eps * k.clone() * S::ratio(1, 4);
            let xy = d.bracket_pp(&x.coords, &y.coords);
            let phi_xy = d.phi(&xy);
            let u_xz = d.u_of(&d.phi(&d.bracket_pp(&x.coords, &z.coords)));
            let u_yz = d.u_of(&d.phi(&d.bracket_pp(&y.coords, &z.coords)));
            // [Y, U] = −Φ_U Y
            let y_u = TangentVec::new(d.bracket_kp(&u_xz, &y.coords)).scale(&-S::one());
            let x_u = TangentVec::new(d.bracket_kp(&u_yz, &x.coords)).scale(&-S::one());
            let tangent = TangentVec::new(phi_xy.apply(&z.coords)).sub(&y_u.sub(&x_u).scale(&quarter_k));
            let (phi_xf, perp) = d.decompose(f.mat());
            let inner = phi_xf.add(&d.phi(&d.u_of(f.mat())).scale(&quarter_k));
            let skew = phi_xy.commutator(&inner).add(&phi_xy.commutator(&perp));
            AtiyahFiber { tangent, skew: Skew::from_mat_unchecked(skew) }
        }
        PointModel::ComplexProjective { n, j } => {
            let (jx, jy, jz) = (j.apply(x), j.apply(y), j.apply(z));
            let two = S::from_i64(2);
            let jy_x = jy.dot(x);
            let a = k.clone() - S::one();
            let b = S::from_i64(2 * *n as i64 + 3) * k.clone() - S::one();
            let tangent = x
                .scale(&y.dot(z))
                .sub(&y.scale(&x.dot(z)))
                .add(&jz.scale(&(two.clone() * jy_x.clone())))
                .scale(&a)
                .add(&jy.scale(&jz.dot(x)).sub(&jx.scale(&jz.dot(y))).scale(&b));
            let xy = wedge(x, y)?;
            let jxjy = wedge(&jx, &jy)?;
            let jfj = Skew::from_mat_unchecked(j.mat().mul(f.mat()).mul(j.mat()));
            let jfx = j.apply(&f.apply(x));
            let jfy = j.apply(&f.apply(y));
            let half_k = k.clone() * S::half();
            let skew = f
                .bracket(&xy.add(&jxjy))
                .scale(&(S::one() - half_k.clone()))
                .add(&f.bracket(j).scale(&(two * jy_x)))
                .add(&jfj.bracket(&xy).sub(&wedge(&jfx, &jy)?).sub(&wedge(&jx, &jfy)?).scale(&half_k));
            AtiyahFiber { tangent, skew }
        }
        PointModel::Product(factors) => {
            let n = base.dim();
            let r = base.curvature_table()?.eval(&x.coords, &y.coords);
            let mut mixed = f.mat().clone();
            let mut tangent = TangentVec::zeros(n);
            let mut skew = Mat::zeros(n, n);
            let mut offset = 0;
            for factor in factors {
                let d = factor.dim();
                let sub = |v: &TangentVec<S>| TangentVec::new(v.coords[offset..offset + d].to_vec());
                let block = Mat::from_fn(d, d, |r, c| f.get(offset + r, offset + c).clone());
                for r in 0..d {
                    for c in 0..d {
                        mixed.set(offset + r, offset + c, S::zero());
                    }
                }
                let part = AtiyahFiber { tangent: sub(z), skew: Skew::from_mat_unchecked(block) };
                let Some(out) = closed_form(factor, k, &sub(x), &sub(y), &part)? else {
                    return Ok(None);
                };
                for r in 0..d {
                    tangent.coords[offset + r] = out.tangent.coords[r].clone();
                    for c in 0..d {
                        skew.set(offset + r, offset + c, out.skew.get(r, c).clone());
                    }
                }
                offset += d;
            }
            let skew = skew.add(&r.commutator(&mixed));
            AtiyahFiber { tangent, skew: Skew::from_mat_unchecked(skew) }
        }
        PointModel::Unimodular3(_) | PointModel::Generic(_) => return Ok(None),
    }))
}

/// Checks whether [`supra_curvature`] uses a closed form for this base.
pub fn has_closed_form<S: Scalar>(base: &PointModel<S>) -> bool {
    match base {
        PointModel::SpaceForm { .. } | PointModel::Surface2D(_) | PointModel::ComplexProjective { .. } => true,
        PointModel::SymmetricSpace(d) => symmetric_h_sign(d, 1e-9).is_some(),
        PointModel::Product(factors) => factors.iter().all(has_closed_form),
        PointModel::Unimodular3(_) | PointModel::Generic(_) => false,
    }
}

/// Supra-curvature table assembled from the base curvature and its derivative.
pub fn supra_table_assembled<S: Scalar>(spec: &AtiyahSpec<S>) -> Result<PairTable<S>> {
    let r = spec.base.curvature_table()?;
    let nabla = spec.base.nabla_table()?;
    Ok(assemble_supra(&spec.k, &r, &nabla))
}

/// `R^E(X_i, X_j)` on flat coordinates, from the closed form where one exists.
pub fn supra_table<S: Scalar>(spec: &AtiyahSpec<S>) -> Result<PairTable<S>> {
    if !has_closed_form(&spec.base) {
        return supra_table_assembled(spec);
    }
    let n = spec.dim();
    let m = spec.rank();
    PairTable::try_from_pairs(n, m, |i, j| {
        let x = TangentVec::basis(n, i);
        let y = TangentVec::basis(n, j);
        let cols = (0..m)
            .map(|u| {
                let xi = AtiyahFiber::from_flat(n, &FiberVec::basis(m, u))?;
                let out = closed_form(&spec.base, &spec.k, &x, &y, &xi)?
                    .ok_or_else(|| Error::Unsupported("closed form unavailable".into()))?;
                Ok(out.to_flat().coords)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Mat::from_columns(&cols))
    })
}

/// `R^E(X,Y)ξ`.
pub fn supra_curvature<S: Scalar>(
    spec: &AtiyahSpec<S>,
    x: &TangentVec<S>,
    y: &TangentVec<S>,
    xi: &FiberVec<S>,
) -> Result<FiberVec<S>> {
    let n = spec.dim();
    check_dim(n, x.dim())?;
    check_dim(n, y.dim())?;
    check_dim(spec.rank(), xi.dim())?;
    if has_closed_form(&spec.base) {
        let fiber = AtiyahFiber::from_flat(n, xi)?;
        if let Some(out) = closed_form(&spec.base, &spec.k, x, y, &fiber)? {
            return Ok(out.to_flat());
        }
    }
    let table = supra_table_assembled(spec)?;
    Ok(FiberVec::new(table.eval(&x.coords, &y.coords).apply(&xi.coords)))
}

/// Derivatives of the supra-curvature along the frame.
#[derive(Clone, Debug, PartialEq)]
pub struct SupraDerivatives<S> {
    /// `∇_W R^E` with the Levi-Civita connection acting on both slots and values.
    pub levi_civita: DerivTable<S>,
    /// `∇^{M,E}_W R^E = ∇_W R^E + [H_W, R^E(·,·)]`, values differentiated by `∇^E`.
    pub full: DerivTable<S>,
}

pub fn supra_derivatives<S: Scalar>(spec: &AtiyahSpec<S>) -> Result<SupraDerivatives<S>> {
    let n = spec.dim();
    let r = spec.base.curvature_table()?;
    let nabla = spec.base.nabla_table()?;
    let nabla2 = spec.base.nabla2_table()?;
    let levi_civita = assemble_supra_derivative(&spec.k, &r, &nabla, &nabla2);
    let supra = supra_table(spec)?;
    let full = levi_civita
        .iter()
        .enumerate()
        .map(|(w, lc)| {
            let hw = h_matrix(&r, &spec.k, &unit(n, w));
            lc.add(&supra.map(|m| hw.commutator(m)))
        })
        .collect();
    Ok(SupraDerivatives { levi_civita, full })
}

/// `(∇^{M,E}_W R^E)(X, Y)ξ`.
pub fn nabla_supra<S: Scalar>(
    spec: &AtiyahSpec<S>,
    w: &TangentVec<S>,
    x: &TangentVec<S>,
    y: &TangentVec<S>,
    xi: &FiberVec<S>,
) -> Result<FiberVec<S>> {
    let d = supra_derivatives(spec)?;
    apply_derivative(&d.full, w, x, y, xi)
}

/// `(∇_W R^E)(X, Y)ξ` with the Levi-Civita connection only.
pub fn nabla_supra_levi_civita<S: Scalar>(
    spec: &AtiyahSpec<S>,
    w: &TangentVec<S>,
    x: &TangentVec<S>,
    y: &TangentVec<S>,
    xi: &FiberVec<S>,
) -> Result<FiberVec<S>> {
    let d = supra_derivatives(spec)?;
    apply_derivative(&d.levi_civita, w, x, y, xi)
}

fn apply_derivative<S: Scalar>(
    table: &DerivTable<S>,
    w: &TangentVec<S>,
    x: &TangentVec<S>,
    y: &TangentVec<S>,
    xi: &FiberVec<S>,
) -> Result<FiberVec<S>> {
    let n = table.len();
    check_dim(n, w.dim())?;
    check_dim(n, x.dim())?;
    check_dim(n, y.dim())?;
    let along = crate::tables::eval_direction(table, &w.coords);
    check_dim(along.size(), xi.dim())?;
    Ok(FiberVec::new(along.eval(&x.coords, &y.coords).apply(&xi.coords)))
}

/// Where the supra-curvature fails to vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct SupraWitness {
    /// Offending product factor, when the verdict is analytic on a product.
    pub factor: Option<usize>,
    /// Frame pair `(i, j)` and flat fiber index `u` with the largest entry of `R^E(X_i,X_j)e_u`.
    pub frame_pair: Option<(usize, usize)>,
    pub fiber_index: Option<usize>,
    pub magnitude: f64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupraVanishing {
    pub vanishes: bool,
    /// True when decided from the model parameters rather than by evaluation.
    pub analytic: bool,
    pub witness: Option<SupraWitness>,
}

fn space_form_flat_or_critical<S: Scalar>(dim: usize, c: &S, k: &S, tol: f64) -> (bool, bool) {
    let flat = dim < 2 || c.is_negligible(tol);
    let critical = (c.clone() * k.clone() - S::from_i64(2)).is_negligible(tol);
    (flat, critical)
}

/// Decides whether `R^E` vanishes at the point.
pub fn supra_vanishes<S: Scalar>(spec: &AtiyahSpec<S>, tol: f64) -> Result<SupraVanishing> {
    let analytic = |vanishes: bool, witness: Option<SupraWitness>| {
        Ok(SupraVanishing { vanishes, analytic: true, witness })
    };
    match &spec.base {
        PointModel::SpaceForm { dim, c } => {
            let (flat, critical) = space_form_flat_or_critical(*dim, c, &spec.k, tol);
            if flat || critical {
                return analytic(true, None);
            }
            let varpi = varpi_space_form(c, &spec.k);
            analytic(
                false,
                Some(SupraWitness {
                    factor: None,
                    frame_pair: Some((0, 1)),
                    fiber_index: Some(1),
                    magnitude: (S::from_i64(2) * varpi).abs().to_f64(),
                    reason: "curvature differs from 0 and 2/k".into(),
                }),
            )
        }
        PointModel::Product(factors)
            if factors.iter().all(|f| matches!(f, PointModel::SpaceForm { .. })) =>
        {
            let mut curved = Vec::new();
            for (idx, f) in factors.iter().enumerate() {
                if let PointModel::SpaceForm { dim, c } = f {
                    let (flat, critical) = space_form_flat_or_critical(*dim, c, &spec.k, tol);
                    if !flat {
                        curved.push((idx, critical));
                    }
                }
            }
            if curved.is_empty() {
                return analytic(true, None);
            }
            if let Some(&(idx, _)) = curved.iter().find(|(_, critical)| !critical) {
                return analytic(
                    false,
                    Some(SupraWitness {
                        factor: Some(idx),
                        frame_pair: None,
                        fiber_index: None,
                        magnitude: f64::NAN,
                        reason: "factor curvature differs from 0 and 2/k".into(),
                    }),
                );
            }
            if factors.len() == 1 {
                return analytic(true, None);
            }
            analytic(
                false,
                Some(SupraWitness {
                    factor: Some(curved[0].0),
                    frame_pair: None,
                    fiber_index: None,
                    magnitude: f64::NAN,
                    reason: "curved factor acts on skew endomorphisms mixing two factors".into(),
                }),
            )
        }
        _ => {
            let table = supra_table(spec)?;
            let n = table.n();
            let mut best: Option<(f64, usize, usize, usize)> = None;
            let mut nonzero = false;
            for i in 0..n {
                for j in i + 1..n {
                    let m = table.get(i, j);
                    for u in 0..m.cols() {
                        for r in 0..m.rows() {
                            let v = m.get(r, u);
                            if !v.is_negligible(tol) {
                                nonzero = true;
                            }
                            let a = v.to_f64().abs();
                            if best.is_none_or(|b| a > b.0) {
                                best = Some((a, i, j, u));
                            }
                        }
                    }
                }
            }
            let witness = if nonzero {
                best.map(|(a, i, j, u)| SupraWitness {
                    factor: None,
                    frame_pair: Some((i, j)),
                    fiber_index: Some(u),
                    magnitude: a,
                    reason: "nonzero entry on the frame grid".into(),
                })
            } else {
                None
            };
            Ok(SupraVanishing { vanishes: !nonzero, analytic: false, witness })
        }
    }
}

/// `𝐊 = 8|ϖ|`, a constant with `|R^E(X,Y)ξ| ≤ 𝐊|X||Y||ξ|` over a space form.
pub fn supra_bound<S: Scalar>(spec: &AtiyahSpec<S>) -> Result<S> {
    match spec.space_form_varpi() {
        Some(v) => Ok(S::from_i64(8) * v.abs()),
        None => Err(Error::Unsupported(format!(
            "curvature bound constant needs a space-form base, got {}",
            spec.base.kind()
        ))),
    }
}

/// Index of `e_i∧e_j` among flat coordinates.
pub fn skew_flat_index(n: usize, i: usize, j: usize) -> usize {
    n + pair_index(n, i, j)
}
