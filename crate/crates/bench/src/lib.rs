//! Fixed benchmark inputs.

use chyp_core::homdesc::sample::random_phi;
use chyp_core::ConnectionData;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A reproducible random description in dimension `n`, with a shift when
/// the spec admits one.
pub fn fixture(n: usize, seed: u64) -> ConnectionData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ConnectionData::new(random_phi(n, &mut rng, true).expect("admissible")).expect("connection")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_reproducible() {
        let a = fixture(4, 1);
        let b = fixture(4, 1);
        assert_eq!(a.phi.phi_n2(), b.phi.phi_n2());
        assert_eq!(a.n(), 4);
    }
}
