use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FiniteDga, MfAlgebra};
use crate::poly::{WPoly, WeightSystem};

/// A named family of finite test dg algebras; the seed drives any random
/// structure constants.
pub struct ZooEntry {
    pub name: &'static str,
    pub build: fn(&mut ChaCha8Rng) -> FiniteDga,
}

fn small_nonzero(rng: &mut ChaCha8Rng) -> i64 {
    let v = rng.random_range(1..=3);
    if rng.random_bool(0.5) { v } else { -v }
}

fn mf_truncation(exp: u32, m: u32) -> FiniteDga {
    let f = WPoly::monomial(vec![exp]);
    let ws = WeightSystem::new(vec![1], exp as i64).expect("weights");
    MfAlgebra::new(&f, &ws, None).expect("A_f").truncated(m).to_finite()
}

pub fn registry() -> Vec<ZooEntry> {
    vec![
        ZooEntry { name: "exterior2", build: |_| FiniteDga::exterior(2) },
        ZooEntry { name: "exterior3", build: |_| FiniteDga::exterior(3) },
        ZooEntry {
            name: "twisted-endp1(x)exterior2",
            build: |rng| {
                let (a, b) = (small_nonzero(rng), small_nonzero(rng));
                FiniteDga::tensor(&FiniteDga::twisted_endp(1, &[a], &[b]), &FiniteDga::exterior(2))
            },
        },
        ZooEntry {
            name: "twisted-endp2",
            build: |rng| {
                let a = [small_nonzero(rng), small_nonzero(rng)];
                let b = [small_nonzero(rng), 0];
                FiniteDga::twisted_endp(2, &a, &b)
            },
        },
        ZooEntry { name: "mf-x2-mod-x2", build: |_| mf_truncation(2, 2) },
        ZooEntry { name: "mf-x3-mod-x3", build: |_| mf_truncation(3, 3) },
        ZooEntry { name: "dual-koszul", build: |_| FiniteDga::dual_numbers_koszul() },
        ZooEntry { name: "idempotent-split", build: |_| FiniteDga::split_idempotent() },
        ZooEntry {
            name: "exterior1(x)dual-koszul",
            build: |_| FiniteDga::tensor(&FiniteDga::exterior(1), &FiniteDga::dual_numbers_koszul()),
        },
    ]
}

pub fn names() -> Vec<&'static str> {
    registry().iter().map(|e| e.name).collect()
}

/// Builds the named zoo algebra with the given seed.
pub fn random_test_dga(name: &str, seed: u64) -> Option<FiniteDga> {
    let entry = registry().into_iter().find(|e| e.name == name)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = (entry.build)(&mut rng);
    a.name = entry.name.to_string();
    Some(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_builds() {
        for name in names() {
            let a = random_test_dga(name, 7).unwrap();
            assert!(a.dim() >= 4, "{name}");
        }
    }

    #[test]
    fn truncated_cubic_has_dimension_eight() {
        assert_eq!(mf_truncation(3, 2).dim(), 8);
    }
}
