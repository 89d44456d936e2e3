use c2bordism_core::formal_group::FglContext;
use c2bordism_core::kernel::linalg::{BitRow, Echelon};
use c2bordism_core::omega::OmegaBasis;
use c2bordism_core::stiefel_whitney::sw_numbers_of_class;

/// Thom: a manifold bounds iff all its SW numbers vanish, so the pairing is injective on each slice.
#[test]
fn sw_numbers_separate_omega_slices() {
    let fgl = FglContext::build(8).unwrap();
    let omega = OmegaBasis::build(&fgl).unwrap();
    for n in 0..=8 {
        let mut ech = Echelon::new();
        for elt in omega.basis(n) {
            let profile = sw_numbers_of_class(&omega, elt, n).unwrap();
            let bits = profile
                .values
                .values()
                .enumerate()
                .filter(|(_, v)| **v)
                .map(|(k, _)| k);
            ech.insert(BitRow::from_bits(bits));
        }
        assert_eq!(ech.rank(), omega.dim(n), "degree {n}");
    }
}
