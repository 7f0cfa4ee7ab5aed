use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::instance::check_positive;
use super::InvProbError;
use crate::number::Rational;

pub const DEFAULT_DEGREE_CAP: u64 = 1 << 20;

/// `p(x) = Σ_i q(x_i)` where `q` is the degree-`n` Bernstein polynomial of
/// `|t|` on `[−R, R]`, `R ≥ √N·β` rational.
///
/// Error bound used for the degree: for `f` with Lipschitz constant `L` on
/// `[0, 1]`, `|B_n f(s) − f(s)| ≤ L·E|K/n − s| ≤ L·√(s(1−s)/n) ≤ L/(2√n)`
/// (`K ~ Bin(n, s)`, Jensen). After rescaling `|t|` has `L = 2R`, so the
/// per-coordinate error is at most `R/√n`, and `n = ⌈(R·N/γ)²⌉` gives a total
/// error of at most γ on the ball `‖x‖₂ ≤ √N·β`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BernsteinApprox {
    dim: usize,
    beta: Rational,
    gamma: Rational,
    radius: Rational,
    degree: u64,
}

/// Certified approximation with default degree cap.
pub fn build_bernstein_l1(dim: usize, beta: &Rational, gamma: &Rational) -> Result<BernsteinApprox, InvProbError> {
    BernsteinApprox::build(dim, beta, gamma, DEFAULT_DEGREE_CAP)
}

/// Smallest rational of the form `k/2^16` that is `≥ √N`.
fn sqrt_upper(n: usize) -> Rational {
    let scaled: BigInt = BigInt::from(n) << 32;
    let s = scaled.sqrt();
    let s = if &s * &s == scaled { s } else { s + 1 };
    Rational::new(s, BigInt::one() << 16).expect("nonzero")
}

impl BernsteinApprox {
    pub fn build(dim: usize, beta: &Rational, gamma: &Rational, cap: u64) -> Result<Self, InvProbError> {
        Self::check_args(dim, beta)?;
        check_positive("gamma", gamma)?;
        let radius = beta * sqrt_upper(dim);
        let ratio = &radius * Rational::from_int(dim as i64) / gamma;
        let required = ratio.square().ceil();
        let required = required.to_u64().unwrap_or(u64::MAX).max(1);
        if required > cap {
            return Err(InvProbError::DegreeCap { required, cap });
        }
        Ok(BernsteinApprox { dim, beta: beta.clone(), gamma: gamma.clone(), radius, degree: required })
    }

    /// Fixed degree; `gamma` becomes the corresponding a-priori bound
    /// `N·R/⌊√n⌋`.
    pub fn with_degree(dim: usize, beta: &Rational, degree: u64) -> Result<Self, InvProbError> {
        Self::check_args(dim, beta)?;
        if degree == 0 {
            return Err(InvProbError::InvalidParameter("degree must be positive".into()));
        }
        let radius = beta * sqrt_upper(dim);
        let root = BigInt::from(degree).sqrt();
        let gamma = &radius * Rational::from_int(dim as i64) / Rational::from_int(root);
        Ok(BernsteinApprox { dim, beta: beta.clone(), gamma, radius, degree })
    }

    fn check_args(dim: usize, beta: &Rational) -> Result<(), InvProbError> {
        if dim == 0 {
            return Err(InvProbError::InvalidParameter("dimension must be at least 1".into()));
        }
        check_positive("beta", beta)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    /// Certified bound on `sup |‖x‖₁ − p(x)|` over the ball.
    pub fn gamma(&self) -> &Rational {
        &self.gamma
    }

    /// Half-width `R` of the interval on which `q` interpolates `|t|`.
    pub fn radius(&self) -> &Rational {
        &self.radius
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    /// Bernstein coefficient `|−R + 2Rk/n|`.
    pub fn coefficient(&self, k: u64) -> Rational {
        let n = self.degree as i64;
        &self.radius * Rational::frac((2 * k as i64 - n).abs(), n)
    }

    pub fn coefficients(&self) -> Vec<Rational> {
        (0..=self.degree).map(|k| self.coefficient(k)).collect()
    }

    /// A-priori per-coordinate bound `R/√n ≤ R/⌊√n⌋`.
    pub fn envelope(&self) -> f64 {
        self.radius.to_f64() / (self.degree as f64).sqrt()
    }

    /// Lipschitz bound of `q` from its coefficients:
    /// `max_k |g_{k+1} − g_k| · n / (2R)`.
    pub fn lipschitz_bound(&self) -> Rational {
        let n = self.degree;
        let max_step = (0..n)
            .map(|k| (self.coefficient(k + 1) - self.coefficient(k)).abs())
            .fold(Rational::zero(), Rational::max);
        max_step * Rational::from_int(n as i64) / (&self.radius * Rational::from_int(2))
    }

    /// Exact value of `q(t)`.
    pub fn eval_coord(&self, t: &Rational) -> Rational {
        // s = (t + R)/(2R) = a/b
        let s = (t + &self.radius) / (&self.radius * Rational::from_int(2));
        let (a, b) = (s.numer().clone(), s.denom().clone());
        let c = &b - &a;
        let n = self.degree as usize;
        let mut c_pows = Vec::with_capacity(n + 1);
        c_pows.push(BigInt::one());
        for j in 0..n {
            let next = &c_pows[j] * &c;
            c_pows.push(next);
        }
        let mut sum = BigInt::zero();
        let mut binom = BigInt::one();
        let mut a_pow = BigInt::one();
        for k in 0..=n {
            let w = (2 * k as i64 - n as i64).abs();
            if w != 0 {
                sum += &binom * &a_pow * &c_pows[n - k] * w;
            }
            binom = binom * (n - k) / (k + 1);
            a_pow *= &a;
        }
        let denom = num_traits::pow(b, n) * BigInt::from(n);
        &self.radius * Rational::new(sum, denom).expect("positive denominator")
    }

    /// Exact value of `p(x)`.
    pub fn eval(&self, x: &[Rational]) -> Rational {
        x.iter().map(|t| self.eval_coord(t)).sum()
    }

    /// Floats `lo ≤ q(t) ≤ hi`, computed with outward rounding in O(n).
    pub fn coord_enclosure(&self, t: &Rational) -> (f64, f64) {
        let u = t.abs();
        if u > self.radius {
            return self.eval_coord(t).f64_bounds();
        }
        // q is even, so evaluate at s = (R − |t|)/(2R) ∈ [0, 1/2]
        let s = (&self.radius - &u) / (&self.radius * Rational::from_int(2));
        let (s_lo, s_hi) = s.f64_bounds();
        let (s_lo, s_hi) = (s_lo.max(0.0), s_hi.min(0.5));
        let om = (down(1.0 - s_hi), up(1.0 - s_lo));
        let rho = (down(s_lo / om.1), up(s_hi / om.0));
        let n = self.degree;
        let (r_lo, r_hi) = self.radius.f64_bounds();
        let nf = n as f64;

        let mut b = Sx::point(1.0).pow(om, n);
        let mut acc = Sx::point(0.0);
        for k in 0..=n {
            let w = (2.0 * k as f64 - nf).abs();
            if w != 0.0 {
                let g = (down(down(r_lo * w) / nf), up(up(r_hi * w) / nf));
                acc = acc.add(b.mul(g));
            }
            if k < n {
                let f = (n - k) as f64 / (k + 1) as f64;
                b = b.mul((down(f), up(f))).mul(rho);
            }
        }
        acc.to_f64()
    }

    /// Rigorous sup-error bound from a grid of spacing `step` on `[−R, R]`
    /// plus Lipschitz padding `step/2·(1 + Lip(q))`.
    pub fn grid_certificate(&self, step: &Rational) -> GridCertificate {
        let grid = self.half_grid(step);
        let mut max_err = 0.0f64;
        for t in &grid {
            let (q_lo, q_hi) = self.coord_enclosure(t);
            let (a_lo, a_hi) = t.abs().f64_bounds();
            max_err = max_err.max(up(q_hi - a_lo)).max(up(a_hi - q_lo));
        }
        let lipschitz = self.lipschitz_bound();
        let pad = step * (&lipschitz + Rational::one()) / Rational::from_int(2);
        let padding = pad.f64_bounds().1;
        let coordinate_error = up(max_err + padding);
        let total_error = up(coordinate_error * self.dim as f64);
        let holds = Rational::from_f64(total_error).is_some_and(|e| e <= self.gamma);
        GridCertificate {
            step: step.clone(),
            points: grid.len(),
            max_grid_error: max_err,
            lipschitz,
            padding,
            coordinate_error,
            total_error,
            gamma: self.gamma.clone(),
            holds,
        }
    }

    /// Largest `|q(t) − |t||` observed on the grid (midpoint estimate).
    pub fn measured_sup_error(&self, step: &Rational) -> f64 {
        self.half_grid(step)
            .iter()
            .map(|t| {
                let (lo, hi) = self.coord_enclosure(t);
                ((lo + hi) / 2.0 - t.abs().to_f64()).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `−R, −R + h, …` up to and including 0; by symmetry this covers `[−R, R]`.
    fn half_grid(&self, step: &Rational) -> Vec<Rational> {
        assert!(step.signum() > 0, "grid step must be positive");
        let mut pts = Vec::new();
        let mut t = -&self.radius;
        while t.signum() < 0 {
            pts.push(t.clone());
            t += step;
        }
        pts.push(Rational::zero());
        pts
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCertificate {
    pub step: Rational,
    pub points: usize,
    pub max_grid_error: f64,
    pub lipschitz: Rational,
    pub padding: f64,
    /// `max_grid_error + padding`, bounding `sup |q(t) − |t||`.
    pub coordinate_error: f64,
    /// `N · coordinate_error`, bounding `sup |p(x) − ‖x‖₁|` on the ball.
    pub total_error: f64,
    pub gamma: Rational,
    pub holds: bool,
}

fn down(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.next_down().max(0.0)
    }
}

fn up(x: f64) -> f64 {
    x.next_up()
}

fn pow2(p: i32) -> f64 {
    debug_assert!((-1022..=1023).contains(&p));
    f64::from_bits(((p + 1023) as u64) << 52)
}

/// Non-negative float interval with a separate binary exponent,
/// `[lo, hi]·2^e`, so long products neither underflow nor overflow.
#[derive(Clone, Copy, Debug)]
struct Sx {
    lo: f64,
    hi: f64,
    e: i32,
}

impl Sx {
    fn point(x: f64) -> Sx {
        Sx { lo: x, hi: x, e: 0 }
    }

    fn mul(self, (lo, hi): (f64, f64)) -> Sx {
        Sx { lo: down(self.lo * lo), hi: up(self.hi * hi), e: self.e }.norm()
    }

    fn mul_sx(self, o: Sx) -> Sx {
        Sx { lo: down(self.lo * o.lo), hi: up(self.hi * o.hi), e: self.e + o.e }.norm()
    }

    fn pow(self, base: (f64, f64), mut n: u64) -> Sx {
        let mut acc = self;
        let mut b = Sx { lo: base.0, hi: base.1, e: 0 }.norm();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_sx(b);
            }
            b = b.mul_sx(b);
            n >>= 1;
        }
        acc
    }

    fn norm(self) -> Sx {
        const LOW: f64 = 5.421010862427522e-20; // 2^-64
        const HIGH: f64 = 1.8446744073709552e19; // 2^64
        if self.hi == 0.0 || !self.hi.is_finite() || (LOW..=HIGH).contains(&self.hi) {
            return self;
        }
        let m = self.hi.log2().floor() as i32;
        let (lo, hi) = scaled(self.lo, self.hi, -m);
        Sx { lo, hi, e: self.e + m }
    }

    fn add(self, o: Sx) -> Sx {
        if o.hi == 0.0 {
            return self;
        }
        if self.hi == 0.0 {
            return o;
        }
        let e = self.e.max(o.e);
        let (a_lo, a_hi) = scaled(self.lo, self.hi, self.e - e);
        let (b_lo, b_hi) = scaled(o.lo, o.hi, o.e - e);
        Sx { lo: down(a_lo + b_lo), hi: up(a_hi + b_hi), e }.norm()
    }

    fn to_f64(self) -> (f64, f64) {
        scaled(self.lo, self.hi, self.e)
    }
}

/// `[lo, hi]·2^p` with outward rounding, applied in safe chunks.
fn scaled(mut lo: f64, mut hi: f64, mut p: i32) -> (f64, f64) {
    while p != 0 {
        let step = p.clamp(-1000, 1000);
        let f = pow2(step);
        lo = down(lo * f);
        hi = up(hi * f);
        p -= step;
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn degree_two_at_origin_is_one_half() {
        let p = BernsteinApprox::with_degree(1, &r(1, 1), 2).unwrap();
        // B₂(f)(1/2) with f(k/2) = |2(k/2) − 1|: (1·1 + 2·0 + 1·1)/4
        assert_eq!(p.eval_coord(&r(0, 1)), r(1, 2));
        let (lo, hi) = p.coord_enclosure(&r(0, 1));
        assert!(lo <= 0.5 && 0.5 <= hi);
    }

    #[test]
    fn interpolates_endpoints() {
        for n in [1, 2, 5, 16] {
            let p = BernsteinApprox::with_degree(1, &r(3, 2), n).unwrap();
            assert_eq!(p.eval_coord(&r(3, 2)), r(3, 2));
            assert_eq!(p.eval_coord(&r(-3, 2)), r(3, 2));
        }
    }

    #[test]
    fn radius_covers_ball() {
        let p = BernsteinApprox::with_degree(2, &r(1, 1), 4).unwrap();
        assert!(p.radius().square() >= r(2, 1));
        assert!(p.radius() < &r(1415, 1000));
        let p = BernsteinApprox::with_degree(4, &r(1, 3), 4).unwrap();
        assert_eq!(p.radius(), &r(2, 3));
    }

    #[test]
    fn degree_from_bound() {
        let p = build_bernstein_l1(1, &r(1, 1), &r(1, 16)).unwrap();
        assert_eq!(p.degree(), 256);
        let err = build_bernstein_l1(1, &r(1, 1), &r(1, 10_000)).unwrap_err();
        assert_eq!(err, InvProbError::DegreeCap { required: 100_000_000, cap: DEFAULT_DEGREE_CAP });
    }

    #[test]
    fn coefficients_are_symmetric_and_lipschitz_one() {
        let p = BernsteinApprox::with_degree(1, &r(1, 1), 7).unwrap();
        let c = p.coefficients();
        for k in 0..c.len() {
            assert_eq!(c[k], c[c.len() - 1 - k]);
        }
        assert_eq!(p.lipschitz_bound(), r(1, 1));
    }

    #[test]
    fn enclosure_contains_exact_value() {
        let p = BernsteinApprox::with_degree(2, &r(1, 1), 40).unwrap();
        for t in [r(0, 1), r(1, 3), r(-7, 10), r(13, 10), r(-1, 1000)] {
            let exact = p.eval_coord(&t);
            let (lo, hi) = p.coord_enclosure(&t);
            assert!(Rational::from_f64(lo).unwrap() <= exact && exact <= Rational::from_f64(hi).unwrap(), "t = {t}");
            assert!(hi - lo < 1e-12);
        }
    }

    #[test]
    fn large_degree_enclosure_is_tight() {
        // (1/2)^n underflows for n > 1074 without the exponent tracking
        let p = BernsteinApprox::with_degree(1, &r(1, 1), 5000).unwrap();
        let (lo, hi) = p.coord_enclosure(&r(0, 1));
        let expected = (2.0 / (std::f64::consts::PI * 5000.0)).sqrt();
        assert!(lo > 0.0 && hi - lo < 1e-9);
        assert!((lo - expected).abs() < 1e-4, "{lo} vs {expected}");
    }

    #[test]
    fn grid_certificate_for_unit_interval() {
        let p = build_bernstein_l1(1, &r(1, 1), &r(1, 16)).unwrap();
        let cert = p.grid_certificate(&Rational::pow2_neg(8));
        assert!(cert.holds, "{cert:?}");
        assert_eq!(cert.points, 257);
    }
}
