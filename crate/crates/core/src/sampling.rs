//! Seeded generators of random symplectic matrices and physical CMs, used by
//! property tests and the self-verification suites.

use nalgebra::{DMatrix, Matrix2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::symplectic::{beam_splitter_matrix, check_physical, is_positive_definite, CovMatrix};

/// Box for the two-mode standard-form parameters `(a, b, c+, c-)`.
const LOCAL_MAX: f64 = 6.0;

#[derive(Debug, Clone)]
pub struct StateSampler {
    rng: ChaCha8Rng,
}

fn rotation(angle: f64) -> Matrix2<f64> {
    let (s, c) = angle.sin_cos();
    Matrix2::new(c, -s, s, c)
}

impl StateSampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..=hi)
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    /// Rotation, squeezing, rotation on one mode.
    pub fn local_symplectic(&mut self) -> Matrix2<f64> {
        let r = self.uniform(-1.0, 1.0);
        let (a, b) = (self.uniform(0.0, std::f64::consts::TAU), self.uniform(0.0, std::f64::consts::TAU));
        rotation(a) * Matrix2::new(r.exp(), 0.0, 0.0, (-r).exp()) * rotation(b)
    }

    fn local_layer(&mut self, n: usize) -> DMatrix<f64> {
        let mut s = DMatrix::zeros(2 * n, 2 * n);
        for k in 0..n {
            let l = self.local_symplectic();
            s.fixed_view_mut::<2, 2>(2 * k, 2 * k).copy_from(&l);
        }
        s
    }

    /// Random symplectic matrix: alternating local layers and beam splitters.
    pub fn symplectic(&mut self, n: usize) -> DMatrix<f64> {
        let mut s = self.local_layer(n);
        if n > 1 {
            for _ in 0..3 * n {
                let i = self.rng.random_range(0..n);
                let mut j = self.rng.random_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                let tau = self.uniform(0.0, 1.0);
                s = beam_splitter_matrix(n, i, j, tau).expect("valid beam splitter") * s;
            }
            s = self.local_layer(n) * s;
        }
        s
    }

    /// Two-mode standard form `[[aI, diag(c+, c-)], [diag(c+, c-), bI]]` with
    /// parameters drawn uniformly from a box; unphysical draws are rejected.
    pub fn two_mode_standard(&mut self) -> CovMatrix {
        loop {
            let a = self.uniform(1.0, LOCAL_MAX);
            let b = self.uniform(1.0, LOCAL_MAX);
            let cp = self.uniform(-LOCAL_MAX, LOCAL_MAX);
            let cm = self.uniform(-LOCAL_MAX, LOCAL_MAX);
            let mut m = DMatrix::zeros(4, 4);
            m[(0, 0)] = a;
            m[(1, 1)] = a;
            m[(2, 2)] = b;
            m[(3, 3)] = b;
            m[(0, 2)] = cp;
            m[(2, 0)] = cp;
            m[(1, 3)] = cm;
            m[(3, 1)] = cm;
            if !is_positive_definite(&m) {
                continue;
            }
            let v = CovMatrix::new(m).expect("symmetric by construction");
            if check_physical(&v).physical {
                return v;
            }
        }
    }

    /// Standard-form state dressed by random local symplectics.
    pub fn two_mode(&mut self) -> CovMatrix {
        let v = self.two_mode_standard();
        let s = self.local_layer(2);
        v.congruence(&s).expect("shapes agree")
    }

    /// Squeezed, rotated thermal state.
    pub fn one_mode(&mut self) -> CovMatrix {
        let nu = self.uniform(1.0, LOCAL_MAX);
        let s = self.local_layer(1);
        CovMatrix::thermal(nu).expect("nu >= 1").congruence(&s).expect("shapes agree")
    }

    /// Thermal states of random variance mixed by a random symplectic.
    pub fn thermal_mix(&mut self, n: usize) -> CovMatrix {
        let mut v = CovMatrix::thermal(self.uniform(1.0, 5.0)).expect("nu >= 1");
        for _ in 1..n {
            let t = CovMatrix::thermal(self.uniform(1.0, 5.0)).expect("nu >= 1");
            v = v.direct_sum(&t);
        }
        let s = self.symplectic(n);
        v.congruence(&s).expect("shapes agree")
    }

    pub fn three_mode(&mut self) -> CovMatrix {
        self.thermal_mix(3)
    }

    /// Random pure state: vacuum under a random symplectic.
    pub fn pure(&mut self, n: usize) -> CovMatrix {
        let s = self.symplectic(n);
        CovMatrix::vacuum(n).congruence(&s).expect("shapes agree")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::SymplecticForm;

    #[test]
    fn symplectic_samples_preserve_omega() {
        let mut s = StateSampler::new(3);
        for n in 1..=4 {
            let m = s.symplectic(n);
            let om = SymplecticForm::new(n);
            let err = (&m * om.matrix() * m.transpose() - om.matrix()).amax();
            assert!(err < 1e-10, "n = {n}, err = {err}");
        }
    }

    #[test]
    fn samples_are_physical_and_reproducible() {
        let mut s = StateSampler::new(11);
        for _ in 0..50 {
            assert!(check_physical(&s.two_mode()).physical);
            assert!(check_physical(&s.one_mode()).physical);
            assert!(check_physical(&s.three_mode()).physical);
        }
        let a = StateSampler::new(5).two_mode();
        let b = StateSampler::new(5).two_mode();
        assert_eq!(a, b);
    }
}
