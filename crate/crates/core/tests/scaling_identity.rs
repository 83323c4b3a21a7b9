use ptlab_core::scaling::{operator_identity_defect, random_coefficients};
use ptlab_core::PotentialSpec;

#[test]
fn dilation_intertwines_physical_and_semiclassical_operators() {
    for (tau, seed) in [(2.0, 1u64), (5.0, 2)] {
        let v = random_coefficients(200, seed);
        let nodes = (56.0 * tau / 0.01) as usize + 1;
        let d = operator_identity_defect(&PotentialSpec::cubic(), tau, &v, 28.0, nodes).unwrap();
        println!("tau={tau} defect={d:e}");
        assert!(d < 1e-8);
    }
}
