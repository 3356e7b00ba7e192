use optosense::presets::{preset, PRESET_NAMES};
use optosense::spectrum::{noise_psd, psd_oracle, psd_sweep};
use optosense::sweep::{linspace, minimize};
use optosense::Model;

fn model(name: &str) -> Model {
    let p = preset(name).unwrap();
    Model::new(&p.params, p.options).unwrap()
}

#[test]
fn every_preset_is_stable_and_agrees_with_oracle() {
    for name in PRESET_NAMES {
        let m = model(name);
        assert!(m.drift().is_stable().unwrap().stable, "{name}");
        for w in [0.5, 0.95, 1.0, 1.07, 1.5] {
            let a = noise_psd(w, &m).unwrap();
            let b = psd_oracle(w, &m).unwrap().total;
            assert!((a.total - b).abs() <= 1e-9 * b, "{name} {w}: {} {b}", a.total);
            let parts = a.th1 + a.th2 + a.ba + a.shot;
            assert!((parts - a.total).abs() <= 1e-12 * a.total);
        }
    }
}

#[test]
fn unknown_preset() {
    assert!(preset("fig4").is_none());
}

#[test]
fn sweep_matches_pointwise() {
    let m = model("fig5");
    let grid = linspace(0.9, 1.1, 101);
    for (w, r) in psd_sweep(&grid, &m) {
        assert_eq!(r.unwrap(), noise_psd(w, &m).unwrap());
    }
}

#[test]
fn gain_lowers_minimum() {
    let f = |name: &str| {
        let m = model(name);
        minimize(|w| noise_psd(w, &m).map(|p| p.total), 1.0, 1.15, 2001).unwrap()
    };
    let (plain, squeezed) = (f("fig3"), f("fig9"));
    assert!((plain.omega_star - 1.15f64.sqrt()).abs() < 1e-6);
    assert!(squeezed.s_star < plain.s_star);
}
