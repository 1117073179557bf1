//! Inter-element continuity of the reduced HCT element.

mod common;

#[test]
fn hct_is_c1_on_a_32_by_32_mesh() {
    let (interior, clamped) = common::hct_conformity(32, 11);
    assert!(interior <= 1e-10, "interior jump {interior:e}");
    assert!(clamped <= 1e-10, "clamped trace {clamped:e}");
}

#[test]
fn hct_is_c1_on_coarse_meshes() {
    for n in [1, 2, 3, 5] {
        let (interior, clamped) = common::hct_conformity(n, n as u64);
        assert!(
            interior <= 1e-10 && clamped <= 1e-10,
            "n = {n}: {interior:e} {clamped:e}"
        );
    }
}
