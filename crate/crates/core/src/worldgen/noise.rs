//! 2D gradient (Perlin) noise seeded from an [`Rng`] stream.

use crate::rng::Rng;

const GRADIENTS: [(f64, f64); 8] = [
    (1.0, 0.0),
    (-1.0, 0.0),
    (0.0, 1.0),
    (0.0, -1.0),
    (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2),
    (-std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2),
    (std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2),
    (-std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2),
];

pub struct GradientNoise {
    perm: [u8; 512],
}

impl GradientNoise {
    pub fn new(mut rng: Rng) -> Self {
        let mut p: [u8; 256] = std::array::from_fn(|i| i as u8);
        for i in (1..256).rev() {
            let j = rng.below(i as u64 + 1) as usize;
            p.swap(i, j);
        }
        let mut perm = [0u8; 512];
        for i in 0..512 {
            perm[i] = p[i & 255];
        }
        GradientNoise { perm }
    }

    #[inline]
    fn grad(&self, xi: i64, yi: i64, dx: f64, dy: f64) -> f64 {
        let h = self.perm[(self.perm[(xi & 255) as usize] as i64 + (yi & 255)) as usize];
        let (gx, gy) = GRADIENTS[(h & 7) as usize];
        gx * dx + gy * dy
    }

    /// Noise at `(x, y)`, roughly in `[-1, 1]`, zero at lattice points.
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let x0 = x.floor();
        let y0 = y.floor();
        let (xi, yi) = (x0 as i64, y0 as i64);
        let (fx, fy) = (x - x0, y - y0);
        let fade = |t: f64| t * t * t * (t * (t * 6.0 - 15.0) + 10.0);
        let (u, v) = (fade(fx), fade(fy));
        let n00 = self.grad(xi, yi, fx, fy);
        let n10 = self.grad(xi + 1, yi, fx - 1.0, fy);
        let n01 = self.grad(xi, yi + 1, fx, fy - 1.0);
        let n11 = self.grad(xi + 1, yi + 1, fx - 1.0, fy - 1.0);
        let a = n00 + u * (n10 - n00);
        let b = n01 + u * (n11 - n01);
        // Scale so the typical extremes sit near +-1.
        (a + v * (b - a)) * std::f64::consts::SQRT_2
    }

    /// Weighted sum of octaves; each `(size, weight)` samples at `x / size`.
    pub fn fractal(&self, x: f64, y: f64, octaves: &[(f64, f64)]) -> f64 {
        let mut total = 0.0;
        let mut weights = 0.0;
        for (i, &(size, weight)) in octaves.iter().enumerate() {
            // Offset octaves so they do not share lattice zeros.
            let off = i as f64 * 17.31;
            total += weight * self.sample(x / size + off, y / size + off);
            weights += weight;
        }
        total / weights
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_bounded() {
        let a = GradientNoise::new(Rng::new(1));
        let b = GradientNoise::new(Rng::new(1));
        let mut lo = f64::MAX;
        let mut hi = f64::MIN;
        for i in 0..2000 {
            let x = i as f64 * 0.37;
            let y = i as f64 * 0.11;
            let v = a.sample(x, y);
            assert_eq!(v, b.sample(x, y));
            lo = lo.min(v);
            hi = hi.max(v);
        }
        assert!(lo >= -1.5 && hi <= 1.5);
        assert!(hi - lo > 0.8, "noise range too flat: {lo}..{hi}");
    }

    #[test]
    fn zero_on_lattice() {
        let n = GradientNoise::new(Rng::new(9));
        assert_eq!(n.sample(3.0, 4.0), 0.0);
    }

    #[test]
    fn smooth() {
        let n = GradientNoise::new(Rng::new(2));
        for i in 0..500 {
            let x = i as f64 * 0.05;
            assert!((n.sample(x, 1.3) - n.sample(x + 0.01, 1.3)).abs() < 0.1);
        }
    }
}
