use gaborlab::framebounds::{lattice_bounds, BoundsConfig};
use gaborlab::lattice::Lattice;
use gaborlab::specs::{load_window, parse_lattice_spec};
use gaborlab::windows::TimeGrid;

fn method(window: &str, lattice: &str) -> String {
    let g = load_window(window, TimeGrid::default()).unwrap();
    let lat = parse_lattice_spec(lattice).unwrap().lattice().unwrap();
    lattice_bounds(&g, &lat, &BoundsConfig::default()).unwrap().method
}

#[test]
fn integer_density_uses_janssen() {
    assert_eq!(method("gauss:gamma=1", "sq:delta=2"), "janssen");
    assert_eq!(method("gauss:gamma=1", "sep:alpha=1,beta=1/2"), "janssen");
}

#[test]
fn rational_density_uses_zak() {
    assert_eq!(method("gauss:gamma=1", "sep:alpha=1/2,beta=4/3"), "zak");
}

#[test]
fn unrecognized_density_uses_finite_section() {
    assert_eq!(method("gauss:gamma=1", "sep:alpha=0.7071,beta=0.7071"), "finite_section");
    assert_eq!(method("gauss:gamma=1", "sq:delta=sqrt(3)"), "finite_section");
}

#[test]
fn symplectic_lattices_are_reduced() {
    let m = method("gauss:gamma=1", "symp:delta=2,S=1,0,1,1");
    assert!(m.starts_with("symplectic_reduction+"), "{m}");
}

#[test]
fn reduction_keeps_the_odd_obstruction() {
    let g = load_window("hermite:n=1", TimeGrid::default()).unwrap();
    let lat = parse_lattice_spec("symp:delta=2,S=1,0.5,0,1").unwrap().lattice().unwrap();
    assert!(Lattice::as_separable(&lat).is_none());
    let fb = lattice_bounds(&g, &lat, &BoundsConfig::default()).unwrap();
    assert!(fb.not_frame(), "{fb:?}");
}
