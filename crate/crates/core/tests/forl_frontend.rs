use tracer_core::forl::{load_spec, parse_spec, pretty_print};

fn data(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn shipped_specs_load() {
    for f in ["sidp.forl", "alm.forl"] {
        let spec = load_spec(&data(f)).unwrap_or_else(|e| panic!("{f}: {e}"));
        for fact in &spec.facts {
            println!("{f} {} horn={} rules={:?}", fact.name, fact.is_horn(), fact.rules.as_ref().map(|r| r.len()));
        }
        assert!(spec.warnings.is_empty(), "{:?}", spec.warnings);
    }
}

#[test]
fn shipped_specs_round_trip() {
    for f in ["sidp.forl", "alm.forl"] {
        let ast = parse_spec(&data(f)).unwrap();
        let printed = pretty_print(&ast);
        let reparsed = parse_spec(&printed).unwrap_or_else(|e| panic!("{e}\n{printed}"));
        assert_eq!(ast, reparsed);
        assert_eq!(printed, pretty_print(&reparsed));
    }
}

#[test]
fn random_bytes_never_crash_the_frontend() {
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    const TOKENS: [&str; 24] = [
        "sig ", "abstract ", "extends ", "fact ", "Reason@ ", "all ", "some ", "no ", "|", ":", "{", "}", "(", ")", "->",
        " in ", " and ", " implies ", "~", "^", ".", "set ", "Artifact", "\n",
    ];
    let sidp = data("sidp.forl");
    let mut rng = StdRng::seed_from_u64(2024);
    let mut accepted = 0;
    for i in 0..10_000 {
        let src: String = match i % 3 {
            0 => {
                let bytes: Vec<u8> = (0..rng.gen_range(0..200)).map(|_| rng.gen()).collect();
                String::from_utf8_lossy(&bytes).into_owned()
            }
            1 => (0..rng.gen_range(0..40)).map(|_| TOKENS[rng.gen_range(0..TOKENS.len())]).collect(),
            _ => {
                let mut chars: Vec<char> = sidp.chars().collect();
                for _ in 0..rng.gen_range(1..6) {
                    if chars.is_empty() {
                        break;
                    }
                    let at = rng.gen_range(0..chars.len());
                    match rng.gen_range(0..3) {
                        0 => {
                            chars.remove(at);
                        }
                        1 => chars.insert(at, rng.gen_range(' '..='~')),
                        _ => chars.truncate(at),
                    }
                }
                chars.into_iter().collect()
            }
        };
        if let Ok(ast) = parse_spec(&src) {
            accepted += 1;
            let printed = pretty_print(&ast);
            assert_eq!(parse_spec(&printed).as_ref(), Ok(&ast), "{src:?}");
            let _ = load_spec(&src);
        }
    }
    assert!(accepted > 0);
}
