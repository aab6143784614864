use std::sync::Arc;

use braidcomplex::cube::build_uconf_with;
use braidcomplex::export::complex_json;
use braidcomplex::subcomplex::induced_in;
use braidcomplex::{make_theta, BuildOptions, Exec};

fn opts(exec: Exec) -> BuildOptions {
    BuildOptions { exec, ..Default::default() }
}

#[test]
fn builds_agree() {
    for m in [4, 6, 9] {
        let g = make_theta(m).unwrap();
        let a = build_uconf_with(&g, 3, &opts(Exec::Sequential)).unwrap();
        let b = build_uconf_with(&g, 3, &opts(Exec::Parallel)).unwrap();
        assert_eq!(complex_json(&a), complex_json(&b));
        assert_eq!(a.check_links(Exec::Sequential).unwrap(), b.check_links(Exec::Parallel).unwrap());
    }
}

#[test]
fn fullness_agrees() {
    let x = Arc::new(build_uconf_with(&make_theta(6).unwrap(), 3, &opts(Exec::Parallel)).unwrap());
    let inc = induced_in(&x, &["a", "b", "1", "2", "3"], &BuildOptions::default()).unwrap();
    let broken = inc.drop_cell(2, 3).unwrap();
    assert_eq!(broken.check_full_links(Exec::Sequential).unwrap(), broken.check_full_links(Exec::Parallel).unwrap());
}
