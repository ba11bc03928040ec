//! A verify run with a deliberately broken assembler must fail.

use rindler_gauss::channel::{assemble_vacuum_sigma, ChannelElements};
use rindler_gauss::gaussian::CovarianceMatrix;
use rindler_gauss::verify::{run_group, VerifyOptions};

fn flip(el: &ChannelElements, i: usize, j: usize) -> CovarianceMatrix {
    let sigma = assemble_vacuum_sigma(el);
    let mut m = sigma.matrix().clone();
    m[(i, j)] = -m[(i, j)];
    m[(j, i)] = -m[(j, i)];
    CovarianceMatrix::new(m, sigma.layout().clone()).unwrap()
}

fn flip_imaginary_entry(el: &ChannelElements) -> CovarianceMatrix {
    flip(el, 1, 7)
}

fn flip_real_entry(el: &ChannelElements) -> CovarianceMatrix {
    flip(el, 0, 7)
}

#[test]
fn correct_assembler_passes() {
    let opts = VerifyOptions::default();
    for group in ["assembly", "physicality"] {
        assert!(run_group(group, &opts).passed(), "{group}");
    }
}

#[test]
fn sign_errors_are_caught() {
    for assembler in [flip_imaginary_entry as fn(&ChannelElements) -> CovarianceMatrix, flip_real_entry] {
        let opts = VerifyOptions {
            assembler,
            ..VerifyOptions::default()
        };
        let assembly = run_group("assembly", &opts);
        let physicality = run_group("physicality", &opts);
        assert!(!assembly.passed() || !physicality.passed());
        assert!(!assembly.passed(), "{assembly:?}");
    }
}
