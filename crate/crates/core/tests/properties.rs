mod common;

use proptest::prelude::*;

use common::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4000))]

    #[test]
    fn flux_conservativity(c in flux_case()) {
        check_flux_conservativity(&c)?;
    }

    #[test]
    fn chi_identities(c in chi_case()) {
        check_chi(&c)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn limiter_bounds_and_means(c in limiter_case()) {
        check_limiter(&sample_meshes(), &c)?;
    }

    #[test]
    fn mesh_closure(c in mesh_case()) {
        check_mesh_closure(&c)?;
    }
}
