//! Parameters, one-dimensional pure jump functions and the jump functional
//! with linear fidelity term.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Jump weight of the normalised problem, `2^(2-θ) / (1-θ)`.
pub fn alpha_theta(theta: f64) -> f64 {
    2f64.powf(2.0 - theta) / (1.0 - theta)
}

/// Cost of a single jump of height `h`; `|h|^θ` with the θ = 0 case counting
/// jumps regardless of height.
#[inline]
pub fn jump_cost(height: f64, theta: f64) -> f64 {
    if theta == 0.0 {
        1.0
    } else {
        height.abs().powf(theta)
    }
}

/// `∫_{x0}^{x1} (value - m x)^2 dx` in a form that avoids cancellation.
#[inline]
pub fn linear_square_integral(value: f64, m: f64, x0: f64, x1: f64) -> f64 {
    let q0 = value - m * x0;
    let q1 = value - m * x1;
    (x1 - x0) * (q0 * q0 + q0 * q1 + q1 * q1) / 3.0
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::param("theta", format!("{theta} not in [0, 1)")));
    }
    Ok(())
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::param(
            name,
            format!("{v} must be positive and finite"),
        ));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams1D")]
pub struct Params1D {
    theta: f64,
    alpha: f64,
    beta: f64,
    m: f64,
}

#[derive(Deserialize)]
struct RawParams1D {
    theta: f64,
    alpha: f64,
    beta: f64,
    m: f64,
}

impl TryFrom<RawParams1D> for Params1D {
    type Error = Error;
    fn try_from(r: RawParams1D) -> Result<Self> {
        Params1D::new(r.theta, r.alpha, r.beta, r.m)
    }
}

impl Params1D {
    pub fn new(theta: f64, alpha: f64, beta: f64, m: f64) -> Result<Self> {
        check_theta(theta)?;
        check_positive("alpha", alpha)?;
        check_positive("beta", beta)?;
        if m == 0.0 || !m.is_finite() {
            return Err(Error::param("m", format!("{m} must be nonzero and finite")));
        }
        Ok(Params1D {
            theta,
            alpha,
            beta,
            m,
        })
    }

    /// The reduced parameters `(θ, α_θ, 3, 1)` for which `H = V = 1`.
    pub fn normalized(theta: f64) -> Result<Self> {
        check_theta(theta)?;
        Params1D::new(theta, alpha_theta(theta), 3.0, 1.0)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn m(&self) -> f64 {
        self.m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams2D")]
pub struct Params2D {
    theta: f64,
    alpha: f64,
    beta: f64,
    xi: [f64; 2],
}

#[derive(Deserialize)]
struct RawParams2D {
    theta: f64,
    alpha: f64,
    beta: f64,
    xi: [f64; 2],
}

impl TryFrom<RawParams2D> for Params2D {
    type Error = Error;
    fn try_from(r: RawParams2D) -> Result<Self> {
        Params2D::new(r.theta, r.alpha, r.beta, r.xi)
    }
}

impl Params2D {
    pub fn new(theta: f64, alpha: f64, beta: f64, xi: [f64; 2]) -> Result<Self> {
        check_theta(theta)?;
        check_positive("alpha", alpha)?;
        check_positive("beta", beta)?;
        let n = xi[0].hypot(xi[1]);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::param(
                "xi",
                "forcing gradient must be nonzero and finite",
            ));
        }
        Ok(Params2D {
            theta,
            alpha,
            beta,
            xi,
        })
    }

    /// `(θ, α_θ, 3, (1, 0))`.
    pub fn normalized(theta: f64) -> Result<Self> {
        check_theta(theta)?;
        Params2D::new(theta, alpha_theta(theta), 3.0, [1.0, 0.0])
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn xi(&self) -> [f64; 2] {
        self.xi
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    a: f64,
    b: f64,
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;
    fn try_from(v: [f64; 2]) -> Result<Self> {
        Interval::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.a, i.b]
    }
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidInterval { a, b });
        }
        Ok(Interval { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn len(&self) -> f64 {
        self.b - self.a
    }
    pub fn contains_open(&self, x: f64) -> bool {
        x > self.a && x < self.b
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub position: f64,
    pub height: f64,
}

/// `u(x) = base + Σ_{position ≤ x} height` with finitely many jumps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPureJump")]
pub struct PureJump1D {
    base: f64,
    jumps: Vec<Jump>,
}

#[derive(Deserialize)]
struct RawPureJump {
    base: f64,
    #[serde(default)]
    jumps: Vec<Jump>,
}

impl TryFrom<RawPureJump> for PureJump1D {
    type Error = Error;
    fn try_from(r: RawPureJump) -> Result<Self> {
        PureJump1D::new(r.base, r.jumps)
    }
}

impl PureJump1D {
    pub fn new(base: f64, jumps: Vec<Jump>) -> Result<Self> {
        if !base.is_finite() {
            return Err(Error::param("base", "must be finite"));
        }
        for (i, j) in jumps.iter().enumerate() {
            if !j.position.is_finite() {
                return Err(Error::param("position", format!("jump {i} is not finite")));
            }
            if j.height == 0.0 || !j.height.is_finite() {
                return Err(Error::DegenerateJump {
                    position: j.position,
                });
            }
            if i > 0 && !(jumps[i - 1].position < j.position) {
                return Err(Error::UnsortedJumps { index: i });
            }
        }
        Ok(PureJump1D { base, jumps })
    }

    pub fn constant(value: f64) -> Self {
        PureJump1D {
            base: value,
            jumps: Vec::new(),
        }
    }

    /// Builds from the first value and the sequence of `(position, value
    /// after the jump)` pairs. Repeated values (zero-height jumps) are dropped.
    pub fn from_levels(first: f64, steps: &[(f64, f64)]) -> Result<Self> {
        let mut jumps = Vec::with_capacity(steps.len());
        let mut current = first;
        for &(position, value) in steps {
            if value != current {
                jumps.push(Jump {
                    position,
                    height: value - current,
                });
                current = value;
            }
        }
        PureJump1D::new(first, jumps)
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.base
            + self
                .jumps
                .iter()
                .take_while(|j| j.position <= x)
                .map(|j| j.height)
                .sum::<f64>()
    }

    /// `x ↦ u(x - t) + m t`, the oblique translation along the forcing line.
    pub fn oblique_translate(&self, t: f64, m: f64) -> Self {
        PureJump1D {
            base: self.base + m * t,
            jumps: self
                .jumps
                .iter()
                .map(|j| Jump {
                    position: j.position + t,
                    height: j.height,
                })
                .collect(),
        }
    }

    /// Constant pieces `(x0, x1, value)` covering the window, in order.
    pub fn pieces(&self, window: Interval) -> Result<Vec<(f64, f64, f64)>> {
        for j in &self.jumps {
            if j.position == window.a() || j.position == window.b() {
                return Err(Error::JumpOnBoundary {
                    position: j.position,
                });
            }
        }
        let mut value = self.eval(window.a());
        let mut start = window.a();
        let mut out = Vec::new();
        for j in self
            .jumps
            .iter()
            .filter(|j| window.contains_open(j.position))
        {
            out.push((start, j.position, value));
            start = j.position;
            value += j.height;
        }
        out.push((start, window.b(), value));
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub jump_term: f64,
    pub fidelity_term: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn new(jump_term: f64, fidelity_term: f64) -> Self {
        // -0.0 from empty sums becomes 0.
        let (jump_term, fidelity_term) = (jump_term + 0.0, fidelity_term + 0.0);
        EnergyBreakdown {
            jump_term,
            fidelity_term,
            total: jump_term + fidelity_term,
        }
    }
}

impl std::ops::Add for EnergyBreakdown {
    type Output = EnergyBreakdown;
    fn add(self, o: Self) -> Self {
        EnergyBreakdown::new(
            self.jump_term + o.jump_term,
            self.fidelity_term + o.fidelity_term,
        )
    }
}

/// The jump functional of `u` on the open window.
pub fn jf_1d(window: Interval, u: &PureJump1D, p: &Params1D) -> Result<EnergyBreakdown> {
    let pieces = u.pieces(window)?;
    let jumps: f64 = u
        .jumps()
        .iter()
        .filter(|j| window.contains_open(j.position))
        .map(|j| jump_cost(j.height, p.theta()))
        .sum();
    let fidelity: f64 = pieces
        .iter()
        .map(|&(x0, x1, v)| linear_square_integral(v, p.m(), x0, x1))
        .sum();
    Ok(EnergyBreakdown::new(p.alpha() * jumps, p.beta() * fidelity))
}

/// Step length `H` and step height `V = M H` of the optimal staircase.
pub fn canonical_h_v(p: &Params1D) -> (f64, f64) {
    let theta = p.theta();
    let h = (3.0 * (1.0 - theta) * p.alpha() / ((2.0 * p.m().abs()).powf(2.0 - theta) * p.beta()))
        .powf(1.0 / (3.0 - theta));
    (h, p.m() * h)
}

/// Energy per unit length of the `(H, MH)` staircase.
pub fn unit_energy_density(h: f64, p: &Params1D) -> f64 {
    p.alpha() * (2.0 * h).powf(p.theta() - 1.0) * p.m().abs().powf(p.theta())
        + p.beta() * p.m() * p.m() * h * h / 3.0
}

/// The homothety `u ↦ u_A`, `u_A(x) = (A/M) u(x/A)`, relating the general
/// problem to the reduced one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Normalization {
    /// Spatial factor `A = 1/H`.
    pub a: f64,
    /// `β M² / (3 A³)`: `JF(u) = scale · JF_norm(u_A)`.
    pub scale: f64,
    m: f64,
    pub params: Params1D,
}

impl Normalization {
    pub fn transform(&self, u: &PureJump1D) -> PureJump1D {
        let f = self.a / self.m;
        PureJump1D {
            base: f * u.base,
            jumps: u
                .jumps
                .iter()
                .map(|j| Jump {
                    position: self.a * j.position,
                    height: f * j.height,
                })
                .collect(),
        }
    }

    pub fn transform_window(&self, w: Interval) -> Interval {
        Interval {
            a: self.a * w.a,
            b: self.a * w.b,
        }
    }
}

/// Reduces `p` to `(θ, α̂, 3, 1)` with the homothety factor `A = 1/H`, which
/// makes `α̂ = α_θ`.
pub fn normalize_params(p: &Params1D) -> Result<Normalization> {
    let (h, _) = canonical_h_v(p);
    normalize_with_factor(p, 1.0 / h)
}

/// Same reduction for an arbitrary homothety factor `a > 0`.
pub fn normalize_with_factor(p: &Params1D, a: f64) -> Result<Normalization> {
    check_positive("a", a)?;
    let theta = p.theta();
    let m_abs = p.m().abs();
    let alpha_hat = 3.0 * p.alpha() / p.beta() * a.powf(3.0 - theta) / m_abs.powf(2.0 - theta);
    Ok(Normalization {
        a,
        scale: p.beta() * p.m() * p.m() / (3.0 * a.powi(3)),
        m: p.m(),
        params: Params1D::new(theta, alpha_hat, 3.0, 1.0)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p0() -> Params1D {
        Params1D::new(0.0, 4.0, 3.0, 1.0).unwrap()
    }

    #[test]
    fn parameter_validation() {
        assert!(Params1D::new(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(Params1D::new(-0.1, 1.0, 1.0, 1.0).is_err());
        assert!(Params1D::new(0.5, 0.0, 1.0, 1.0).is_err());
        assert!(Params1D::new(0.5, 1.0, -1.0, 1.0).is_err());
        assert!(Params1D::new(0.5, 1.0, 1.0, 0.0).is_err());
        assert!(Params2D::new(0.0, 1.0, 1.0, [0.0, 0.0]).is_err());
        let json = r#"{"theta":1.0,"alpha":1,"beta":1,"m":1}"#;
        assert!(serde_json::from_str::<Params1D>(json).is_err());
    }

    #[test]
    fn canonical_h_v_examples() {
        let (h, v) = canonical_h_v(&p0());
        assert!((h - 1.0).abs() < 1e-15 && (v - 1.0).abs() < 1e-15);
        let half = Params1D::new(0.5, 1.0, 3.0, 1.0).unwrap();
        let half_norm = Params1D::normalized(0.5).unwrap();
        assert!((half_norm.alpha() - 2f64.powf(1.5) / 0.5).abs() < 1e-15);
        let (h, _) = canonical_h_v(&half_norm);
        assert!((h - 1.0).abs() < 1e-14);
        assert!(canonical_h_v(&half).0 < 1.0);
        let (h, v) = canonical_h_v(&Params1D::new(0.0, 4.0, 3.0, 2.0).unwrap());
        assert!((h - 0.25f64.cbrt()).abs() < 1e-15);
        assert!((v - 2.0 * 0.25f64.cbrt()).abs() < 1e-15);
    }

    #[test]
    fn unit_density_value() {
        assert!((unit_energy_density(1.0, &p0()) - 3.0).abs() < 1e-15);
        assert!(unit_energy_density(1e-12, &p0()) > 1e11);
    }

    #[test]
    fn jf_1d_examples() {
        let zero = PureJump1D::constant(0.0);
        let e = jf_1d(Interval::new(-1.0, 1.0).unwrap(), &zero, &p0()).unwrap();
        assert_eq!(e.jump_term, 0.0);
        assert!((e.fidelity_term - 2.0).abs() < 1e-15 && (e.total - 2.0).abs() < 1e-15);
        let e = jf_1d(Interval::new(-3.0, 3.0).unwrap(), &zero, &p0()).unwrap();
        assert!((e.total - 54.0).abs() < 1e-13);
        let s = PureJump1D::from_levels(-2.0, &[(-1.0, 0.0), (1.0, 2.0)]).unwrap();
        let e = jf_1d(Interval::new(-3.0, 3.0).unwrap(), &s, &p0()).unwrap();
        assert!((e.jump_term - 8.0).abs() < 1e-15);
        assert!((e.fidelity_term - 6.0).abs() < 1e-14);
        assert!((e.total - 14.0).abs() < 1e-14);
    }

    #[test]
    fn boundary_jump_rejected() {
        let s = PureJump1D::from_levels(0.0, &[(1.0, 2.0)]).unwrap();
        let err = jf_1d(Interval::new(-1.0, 1.0).unwrap(), &s, &p0()).unwrap_err();
        assert_eq!(err, Error::JumpOnBoundary { position: 1.0 });
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            PureJump1D::new(
                0.0,
                vec![
                    Jump {
                        position: 1.0,
                        height: 1.0
                    },
                    Jump {
                        position: 0.0,
                        height: 1.0
                    }
                ]
            ),
            Err(Error::UnsortedJumps { index: 1 })
        ));
        assert!(PureJump1D::new(
            0.0,
            vec![Jump {
                position: 1.0,
                height: 0.0
            }]
        )
        .is_err());
        assert!(Interval::new(1.0, 1.0).is_err());
    }

    #[test]
    fn normalization_of_already_normalized() {
        let n = normalize_params(&p0()).unwrap();
        assert!((n.scale - 1.0).abs() < 1e-15);
        assert!((n.params.alpha() - 4.0).abs() < 1e-14);
        let p = Params1D::new(0.0, 4.0, 3.0, 2.0).unwrap();
        let n = normalize_params(&p).unwrap();
        assert!((n.a - 1.0 / canonical_h_v(&p).0).abs() < 1e-14);
        assert!((n.params.alpha() - 4.0).abs() < 1e-13);
    }

    fn arb_jumps() -> impl Strategy<Value = PureJump1D> {
        (
            -3.0f64..3.0,
            proptest::collection::vec(
                (-2.9f64..2.9, prop_oneof![-3.0f64..-0.1, 0.1f64..3.0]),
                0..8,
            ),
        )
            .prop_map(|(base, mut js)| {
                js.sort_by(|a, b| a.0.total_cmp(&b.0));
                js.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-6);
                PureJump1D::new(
                    base,
                    js.into_iter()
                        .map(|(position, height)| Jump { position, height })
                        .collect(),
                )
                .unwrap()
            })
    }

    proptest! {
        #[test]
        fn homothety_identity(u in arb_jumps(), theta in 0.0f64..0.95, alpha in 0.1f64..10.0,
                              beta in 0.1f64..10.0, m in prop_oneof![-4.0f64..-0.2, 0.2f64..4.0],
                              l in prop_oneof![Just(3.0f64), Just(3.1f64), Just(3.3f64)]) {
            let p = Params1D::new(theta, alpha, beta, m).unwrap();
            let n = normalize_params(&p).unwrap();
            prop_assert!((n.params.alpha() - alpha_theta(theta)).abs() < 1e-9 * alpha_theta(theta));
            let w = Interval::new(-l, l).unwrap();
            let lhs = jf_1d(w, &u, &p).unwrap().total;
            let rhs = n.scale * jf_1d(n.transform_window(w), &n.transform(&u), &n.params).unwrap().total;
            prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
        }

        #[test]
        fn oblique_translation_invariance(u in arb_jumps(), t in -2.0f64..2.0, theta in 0.0f64..0.9) {
            let p = Params1D::normalized(theta).unwrap();
            let w = Interval::new(-3.05, 3.05).unwrap();
            let shifted = Interval::new(-3.05 + t, 3.05 + t).unwrap();
            let a = jf_1d(w, &u, &p).unwrap().total;
            let b = jf_1d(shifted, &u.oblique_translate(t, 1.0), &p).unwrap().total;
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0), "{a} vs {b}");
        }

        #[test]
        fn additivity_over_windows(u in arb_jumps(), cut in -2.0f64..2.0) {
            prop_assume!(u.jumps().iter().all(|j| (j.position - cut).abs() > 1e-9));
            let p = Params1D::normalized(0.3).unwrap();
            let whole = jf_1d(Interval::new(-3.0, 3.0).unwrap(), &u, &p).unwrap();
            let left = jf_1d(Interval::new(-3.0, cut).unwrap(), &u, &p).unwrap();
            let right = jf_1d(Interval::new(cut, 3.0).unwrap(), &u, &p).unwrap();
            prop_assert!((whole.total - (left + right).total).abs() < 1e-11 * whole.total.max(1.0));
        }
    }
}
