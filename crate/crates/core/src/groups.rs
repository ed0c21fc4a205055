//! U(1) and SU(2) with Haar sampling.

use std::f64::consts::PI;
use std::fmt::Debug;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// An element of a compact matrix group small enough to sample directly.
pub trait GroupElement: Copy + Debug + Send + Sync + PartialEq {
    fn identity() -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn inverse(&self) -> Self;
    /// Tr/N, the normalised trace, as a complex number.
    fn normalized_trace(&self) -> Complex64;
    fn haar<R: Rng + ?Sized>(rng: &mut R) -> Self;
    /// Distance to another element, used in tests.
    fn distance(&self, other: &Self) -> f64;
}

/// Which small group a computation runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmallGroup {
    U1,
    Su2,
}

impl std::str::FromStr for SmallGroup {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "u1" | "u(1)" => Ok(SmallGroup::U1),
            "su2" | "su(2)" => Ok(SmallGroup::Su2),
            other => Err(format!("unknown group '{other}' (expected u1 or su2)")),
        }
    }
}

/// e^{iθ} with θ ∈ (−π, π].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct U1(f64);

impl U1 {
    pub fn new(angle: f64) -> Self {
        let mut a = angle.rem_euclid(2.0 * PI);
        if a > PI {
            a -= 2.0 * PI;
        }
        U1(a)
    }

    pub fn angle(&self) -> f64 {
        self.0
    }
}

impl GroupElement for U1 {
    fn identity() -> Self {
        U1(0.0)
    }

    fn mul(&self, other: &Self) -> Self {
        U1::new(self.0 + other.0)
    }

    fn inverse(&self) -> Self {
        U1::new(-self.0)
    }

    fn normalized_trace(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.0)
    }

    fn haar<R: Rng + ?Sized>(rng: &mut R) -> Self {
        U1::new(rng.random_range(-PI..PI))
    }

    fn distance(&self, other: &Self) -> f64 {
        (self.normalized_trace() - other.normalized_trace()).norm()
    }
}

/// A unit quaternion q₀ + q₁i + q₂j + q₃k, identified with
/// [[q₀ + iq₃, −q₂ + iq₁], [q₂ + iq₁, q₀ − iq₃]].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2([f64; 4]);

impl Su2 {
    /// Normalises `q` onto the unit sphere.
    pub fn new(q: [f64; 4]) -> Self {
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(norm > 0.0, "zero quaternion");
        Su2(q.map(|x| x / norm))
    }

    /// The element with eigenvalues e^{±iθ} rotating about `axis`.
    pub fn from_angle_axis(theta: f64, axis: [f64; 3]) -> Self {
        let n = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
        let s = theta.sin() / n;
        Su2::new([theta.cos(), axis[0] * s, axis[1] * s, axis[2] * s])
    }

    pub fn quaternion(&self) -> [f64; 4] {
        self.0
    }

    /// Eigenvalue angle θ ∈ [0, π]; the eigenvalues are e^{±iθ}.
    pub fn angle(&self) -> f64 {
        self.0[0].clamp(-1.0, 1.0).acos()
    }

    /// Tr U = 2 cos θ.
    pub fn trace(&self) -> f64 {
        2.0 * self.0[0]
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn to_matrix(&self) -> [[Complex64; 2]; 2] {
        let [a, b, c, d] = self.0;
        [
            [Complex64::new(a, d), Complex64::new(-c, b)],
            [Complex64::new(c, b), Complex64::new(a, -d)],
        ]
    }
}

impl GroupElement for Su2 {
    fn identity() -> Self {
        Su2([1.0, 0.0, 0.0, 0.0])
    }

    fn mul(&self, other: &Self) -> Self {
        let [a1, b1, c1, d1] = self.0;
        let [a2, b2, c2, d2] = other.0;
        Su2::new([
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ])
    }

    fn inverse(&self) -> Self {
        let [a, b, c, d] = self.0;
        Su2([a, -b, -c, -d])
    }

    fn normalized_trace(&self) -> Complex64 {
        Complex64::new(self.0[0], 0.0)
    }

    fn haar<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            if q.iter().map(|x| x * x).sum::<f64>() > 1e-300 {
                return Su2::new(q);
            }
        }
    }

    fn distance(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    }
}

/// χ_m(θ) = sin((m+1)θ)/sin θ = U_m(cos θ), the character of the
/// (m+1)-dimensional irreducible representation of SU(2).
pub fn su2_character(m: u32, cos_theta: f64) -> f64 {
    let (mut u0, mut u1) = (1.0, 2.0 * cos_theta);
    if m == 0 {
        return u0;
    }
    for _ in 1..m {
        let u2 = 2.0 * cos_theta * u1 - u0;
        u0 = u1;
        u1 = u2;
    }
    u1
}

/// Group commutator x y x⁻¹ y⁻¹.
pub fn commutator<G: GroupElement>(x: &G, y: &G) -> G {
    x.mul(y).mul(&x.inverse()).mul(&y.inverse())
}
