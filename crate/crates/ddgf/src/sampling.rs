//! The discrete index set: coprime directions, modulations and translations
//! built from the integer frequency lattice.
//!
//! Every lattice point `a` carries the direction `u = a/‖a‖` and modulation
//! `m = ‖a‖`, so the map `(u,m) ↦ mu` is a bijection onto the lattice. The
//! DC point `a = 0` uses the fixed direction `u₀ = (1,0)`. Coefficient
//! entries are ordered lexicographically in `(a₁, a₂)` and then by ascending
//! translation, which fixes the coefficient file layout.

/// Point of the frequency lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub a1: i32,
    pub a2: i32,
}

impl LatticePoint {
    pub fn new(a1: i32, a2: i32) -> Self {
        LatticePoint { a1, a2 }
    }

    /// gcd with the convention gcd(x,0) = |x|; (0,0) maps to 0.
    pub fn gcd(&self) -> i32 {
        fn g(a: i32, b: i32) -> i32 {
            if b == 0 {
                a.abs()
            } else {
                g(b, a % b)
            }
        }
        g(self.a1.abs(), self.a2.abs())
    }

    pub fn is_coprime(&self) -> bool {
        self.gcd() == 1
    }

    pub fn norm(&self) -> f64 {
        ((self.a1 as f64).powi(2) + (self.a2 as f64).powi(2)).sqrt()
    }
}

/// Direction/modulation pair attached to a lattice point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionModulation {
    pub a: LatticePoint,
    /// Unit direction; `(1,0)` for the DC point.
    pub u: (f64, f64),
    /// `‖a‖₂`.
    pub m: f64,
}

impl DirectionModulation {
    pub fn from_lattice_point(a: LatticePoint) -> Self {
        if a.a1 == 0 && a.a2 == 0 {
            DirectionModulation { a, u: (1.0, 0.0), m: 0.0 }
        } else {
            let m = a.norm();
            DirectionModulation { a, u: (a.a1 as f64 / m, a.a2 as f64 / m), m }
        }
    }
}

/// Finite index set: lattice points crossed with a translation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingSet {
    pub m_extent: i32,
    pub n_extent: i32,
    /// Lattice points in lexicographic `(a₁, a₂)` order.
    pub lattice: Vec<LatticePoint>,
    /// Translation offsets in pixel units, ascending.
    pub translations: Vec<f64>,
    /// Coprime representatives of the lattice, lexicographic order.
    pub direction_basis: Vec<LatticePoint>,
}

/// Exactly the coprime pairs of `([−M,M]×[−N,N]) ∩ Z² \ {0}`, lexicographic.
pub fn coprime_directions(m: i32, n: i32) -> Vec<LatticePoint> {
    let mut out = Vec::new();
    for a1 in -m..=m {
        for a2 in -n..=n {
            let p = LatticePoint::new(a1, a2);
            if p.is_coprime() {
                out.push(p);
            }
        }
    }
    out
}

/// Builds the standard index set for a `2M × 2N` image: full symmetric
/// lattice and translations `{step·k : |k| ≤ k_max}`. `k_max = 0` yields the
/// non-redundant system (translations `{0}` only).
pub fn build_sampling_set(m: i32, n: i32, translation_step: f64, k_max: i32) -> SamplingSet {
    assert!(m >= 1 && n >= 1, "lattice extents must be at least 1");
    assert!(translation_step > 0.0, "translation step must be positive");
    assert!(k_max >= 0, "k_max must be nonnegative");
    let mut lattice = Vec::with_capacity(((2 * m + 1) * (2 * n + 1)) as usize);
    for a1 in -m..=m {
        for a2 in -n..=n {
            lattice.push(LatticePoint::new(a1, a2));
        }
    }
    let translations = (-k_max..=k_max)
        .map(|k| translation_step * k as f64)
        .collect();
    SamplingSet {
        m_extent: m,
        n_extent: n,
        lattice,
        translations,
        direction_basis: coprime_directions(m, n),
    }
}

/// Index set whose lattice is a complete DFT bin range `[−P/2, P/2−1]²`,
/// used where exact discrete Parseval identities are needed.
pub fn dft_bin_lattice(px: usize, py: usize, translation_step: f64, k_max: i32) -> SamplingSet {
    assert!(px % 2 == 0 && py % 2 == 0);
    let (hx, hy) = (px as i32 / 2, py as i32 / 2);
    let mut lattice = Vec::with_capacity(px * py);
    for a1 in -hx..hx {
        for a2 in -hy..hy {
            lattice.push(LatticePoint::new(a1, a2));
        }
    }
    let translations = (-k_max..=k_max)
        .map(|k| translation_step * k as f64)
        .collect();
    let direction_basis = lattice.iter().copied().filter(LatticePoint::is_coprime).collect();
    SamplingSet {
        m_extent: hx,
        n_extent: hy,
        lattice,
        translations,
        direction_basis,
    }
}

impl SamplingSet {
    pub fn entry_count(&self) -> usize {
        self.lattice.len() * self.translations.len()
    }

    /// Canonical entry order: lattice points lexicographic, then ascending
    /// translation. The flat index of `(lattice[i], translations[j])` is
    /// `i·|translations| + j`.
    pub fn entries(&self) -> impl Iterator<Item = (LatticePoint, f64)> + '_ {
        self.lattice
            .iter()
            .flat_map(move |&a| self.translations.iter().map(move |&t| (a, t)))
    }

    /// Checks that `(u,m) ↦ mu` restricted to this set reproduces the
    /// lattice exactly: per-coordinate reconstruction error below 1e-9,
    /// no duplicates, and the DC point carried by `u₀ = (1,0)` exactly once.
    pub fn verify_bijection(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        let mut dc_count = 0;
        for &a in &self.lattice {
            let dm = DirectionModulation::from_lattice_point(a);
            let (r1, r2) = (dm.m * dm.u.0, dm.m * dm.u.1);
            if (r1 - a.a1 as f64).abs() >= 1e-9 || (r2 - a.a2 as f64).abs() >= 1e-9 {
                return false;
            }
            if a.a1 == 0 && a.a2 == 0 {
                dc_count += 1;
                if dm.u != (1.0, 0.0) {
                    return false;
                }
            }
            if !seen.insert((r1.round() as i64, r2.round() as i64)) {
                return false;
            }
        }
        dc_count == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force oracle: plain Euclid over all candidates.
    fn coprime_count_oracle(m: i32, n: i32) -> usize {
        fn g(a: i32, b: i32) -> i32 {
            if b == 0 {
                a
            } else {
                g(b, a % b)
            }
        }
        let mut count = 0;
        for a1 in -m..=m {
            for a2 in -n..=n {
                if (a1, a2) != (0, 0) && g(a1.abs().max(a2.abs()), a1.abs().min(a2.abs())) == 1 {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn coprime_directions_small_cases() {
        assert_eq!(coprime_directions(1, 1).len(), 8);
        assert_eq!(coprime_directions(1, 1).len(), coprime_count_oracle(1, 1));
        assert_eq!(coprime_directions(2, 2).len(), 16);
        assert_eq!(coprime_directions(2, 2).len(), coprime_count_oracle(2, 2));
        assert!(!LatticePoint::new(2, 0).is_coprime());
        assert!(LatticePoint::new(0, 1).is_coprime());
        assert!(!LatticePoint::new(0, 0).is_coprime());
    }

    #[test]
    fn coprime_output_is_lexicographic() {
        let d = coprime_directions(3, 3);
        let mut sorted = d.clone();
        sorted.sort();
        assert_eq!(d, sorted);
    }

    #[test]
    fn sampling_set_counts() {
        let s = build_sampling_set(4, 4, 4.0, 5);
        assert_eq!(s.translations.len(), 11);
        assert_eq!(s.entry_count(), 11 * 9 * 9);

        let s0 = build_sampling_set(1, 1, 4.0, 0);
        assert_eq!(s0.entry_count(), 9);
        assert_eq!(s0.translations, vec![0.0]);
    }

    #[test]
    fn full_scale_entry_count_and_redundancy() {
        let s = build_sampling_set(64, 64, 4.0, 5);
        assert_eq!(s.entry_count(), 11 * 129 * 129);
        let redundancy = s.entry_count() as f64 / (128.0 * 128.0);
        assert!((redundancy - 11.17).abs() < 0.02);
    }

    #[test]
    fn bijection_holds_for_built_sets() {
        assert!(build_sampling_set(1, 1, 4.0, 0).verify_bijection());
        assert!(build_sampling_set(64, 64, 4.0, 5).verify_bijection());
        assert!(dft_bin_lattice(16, 16, 4.0, 0).verify_bijection());
    }

    #[test]
    fn duplicated_entry_breaks_bijection() {
        let mut s = build_sampling_set(2, 2, 4.0, 0);
        s.lattice.push(LatticePoint::new(1, 1));
        assert!(!s.verify_bijection());
    }

    #[test]
    fn unique_coprime_decomposition() {
        // every a ≠ 0 is s·d for exactly one coprime d and s = gcd ≥ 1
        let s = build_sampling_set(6, 6, 4.0, 0);
        for &a in &s.lattice {
            if a == LatticePoint::new(0, 0) {
                continue;
            }
            let g = a.gcd();
            assert!(g >= 1);
            let d = LatticePoint::new(a.a1 / g, a.a2 / g);
            assert!(d.is_coprime());
            let matches = s
                .direction_basis
                .iter()
                .filter(|&&b| a.a1 == g * b.a1 && a.a2 == g * b.a2)
                .count();
            assert_eq!(matches, 1, "a = {a:?}");
        }
    }

    #[test]
    fn directions_have_unit_norm() {
        for &a in &build_sampling_set(8, 8, 4.0, 0).lattice {
            let dm = DirectionModulation::from_lattice_point(a);
            let n = (dm.u.0 * dm.u.0 + dm.u.1 * dm.u.1).sqrt();
            assert!((n - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn entry_order_is_lattice_major_translation_minor() {
        let s = build_sampling_set(1, 1, 2.0, 1);
        let e: Vec<_> = s.entries().collect();
        assert_eq!(e[0], (LatticePoint::new(-1, -1), -2.0));
        assert_eq!(e[1], (LatticePoint::new(-1, -1), 0.0));
        assert_eq!(e[2], (LatticePoint::new(-1, -1), 2.0));
        assert_eq!(e[3], (LatticePoint::new(-1, 0), -2.0));
    }
}
