use blowdown::constructions::{self, Construction};
use blowdown::lattice::SurfaceModel;
use blowdown::rational::{self, Rational};

fn load(name: &str) -> Construction {
    constructions::load_builtin(name).expect(name)
}

#[test]
fn builtins_verify_and_are_cited() {
    for name in constructions::list_builtins() {
        let c = load(&name);
        assert!(c.uncited().is_empty(), "{name}: {:?}", c.uncited());
        let r = constructions::verify(&c);
        let failures: Vec<String> = r.failures().iter().map(|f| f.line()).collect();
        assert!(failures.is_empty(), "{name}: {failures:#?}");
    }
}

#[test]
fn json_round_trip_preserves_report() {
    for name in constructions::list_builtins() {
        let c = load(&name);
        let again = Construction::from_json(&c.to_json(), "round trip").unwrap();
        assert_eq!(again, c);
        assert_eq!(constructions::verify(&again), constructions::verify(&c));
    }
}

// The printed coefficients that disagree with the lattice are carried as
// errata; verify compares against the corrected value and shows both.
#[test]
fn main_k3_errata_are_reported() {
    let r = constructions::verify(&load("main_k3"));
    for id in ["pullback:I3", "pullback:I4", "pullback:I5", "pullback:I6", "pullback:E2''", "nef:E2''"] {
        let check = r.check(id).unwrap_or_else(|| panic!("missing {id}"));
        assert!(check.pass, "{}", check.line());
        assert!(check.detail.contains("printed"), "{}", check.line());
    }
    assert!(r.check("pullback:G10").unwrap().detail.starts_with("146/35"));
}

fn pair(model: &SurfaceModel, a: &str, b: &str) -> Rational {
    model.intersect_curves(a, b).unwrap()
}

/// Chains sit at the stated squares, consecutive curves meet once and
/// distinct chains are disjoint; checked here straight from the lattice.
#[test]
fn chain_curves_in_the_lattice() {
    for name in constructions::list_builtins() {
        let c = load(&name);
        let model = c.script.run().unwrap();
        let curves: Vec<(usize, &String)> =
            c.chains.iter().enumerate().flat_map(|(i, ch)| ch.curves.iter().map(move |n| (i, n))).collect();
        for ch in &c.chains {
            for (n, &b) in ch.curves.iter().zip(&ch.entries) {
                assert_eq!(model.self_intersection(n).unwrap(), rational::int(-i64::from(b)), "{name} {n}");
            }
            for w in ch.curves.windows(2) {
                assert_eq!(pair(&model, &w[0], &w[1]), rational::int(1), "{name} {}-{}", w[0], w[1]);
            }
        }
        for (i, (ci, a)) in curves.iter().enumerate() {
            for (cj, b) in &curves[i + 1..] {
                if ci != cj {
                    assert_eq!(pair(&model, a, b), rational::int(0), "{name} {a} meets {b}");
                }
            }
        }
    }
}

#[test]
fn k_squared_gain_is_total_length() {
    for name in constructions::list_builtins() {
        let c = load(&name);
        let a = constructions::analyze(&c).unwrap();
        let length: usize = c.chains.iter().map(|ch| ch.entries.len()).sum();
        let kz = rational::parse(&a.contraction.k_squared_z).unwrap();
        let kx = rational::parse(&a.contraction.k_squared).unwrap();
        assert_eq!(kz, rational::int(9 - c.script.steps.len() as i64));
        assert_eq!(kx - kz, rational::int(length as i64), "{name}");
    }
}
