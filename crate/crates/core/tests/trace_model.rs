use proptest::prelude::*;
use tracer_core::forl::load_spec;
use tracer_core::model::{Accepted, LocationKind, ModelError, Origin, TraceLink, TraceLocation, TraceabilityInformation};

fn data(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn location() -> impl Strategy<Value = LocationKind> {
    let path = "[a-z]{1,6}(/[a-z]{1,6})?\\.(txt|java|xmi)";
    prop_oneof![
        (path, 0u64..500, 0u64..200).prop_map(|(path, offset, length)| LocationKind::Text { path, offset, length }),
        path.prop_map(|path| LocationKind::File { path }),
        (path, "//@[a-z]{1,5}\\.[0-9]").prop_map(|(path, fragment)| LocationKind::Xmi { path, fragment }),
        (path, prop::collection::vec("[A-Za-z]{1,6}", 0..4)).prop_map(|(path, ast_path)| LocationKind::Java { path, ast_path }),
    ]
}

prop_compose! {
    fn workspace()(
        kinds in prop::collection::vec(location(), 1..8),
        raw_links in prop::collection::vec((any::<prop::sample::Index>(), any::<prop::sample::Index>(), 0usize..4, 0usize..3), 0..10),
        typed in prop::collection::vec(any::<bool>(), 8),
        revision in 0u64..1000,
    ) -> TraceabilityInformation {
        let mut info = TraceabilityInformation::new();
        for (i, kind) in kinds.into_iter().enumerate() {
            let parent = (i > 0 && i % 3 == 0).then(|| format!("loc{}", i - 1));
            info.add_location(TraceLocation { id: format!("loc{i}"), kind, parent, broken: i % 5 == 4 }).unwrap();
        }
        let n = info.locations.len();
        for (a, b, rel, origin) in raw_links {
            let link = TraceLink {
                id: info.fresh_id("l"),
                endpoints: vec![format!("loc{}", a.index(n)), format!("loc{}", b.index(n))],
                relation: ["requires", "conflicts", "refines"].get(rel).map(|r| r.to_string()),
                origin: [Origin::Manual, Origin::Dl, Origin::Rl][origin],
            };
            info.add_link(link).unwrap();
        }
        for i in 0..n {
            if typed[i] {
                info.types.insert(format!("loc{i}"), "Requirement".to_string());
            }
        }
        info.revision = revision;
        info
    }
}

proptest! {
    #[test]
    fn save_load_round_trips(info in workspace()) {
        let text = info.save();
        let back = TraceabilityInformation::load(&text).unwrap();
        prop_assert_eq!(&back, &info);
        prop_assert_eq!(back.save(), text);
    }
}

#[test]
fn shipped_workspaces_are_canonical() {
    for f in ["table1.trace.json", "contains-chain.trace.json"] {
        let text = data(f);
        let info = TraceabilityInformation::load(&text).unwrap();
        assert_eq!(info.save(), text, "{f}");
    }
}

#[test]
fn malformed_documents_point_at_the_problem() {
    let e = TraceabilityInformation::load("{\"version\": 1,\n \"links\": [}").unwrap_err();
    let ModelError::Malformed(m) = e else { panic!("{e:?}") };
    assert_eq!(m.line, 2);

    let e = TraceabilityInformation::load(r#"{"version": 9}"#).unwrap_err();
    let ModelError::Malformed(m) = e else { panic!("{e:?}") };
    assert_eq!(m.pointer.as_deref(), Some("/version"));

    let doc = r#"{"version":1,"locations":[{"id":"a","kind":"File","path":"a"}],
        "links":[{"id":"l","endpoints":["a","b"]}]}"#;
    let ModelError::Malformed(m) = TraceabilityInformation::load(doc).unwrap_err() else { panic!() };
    assert_eq!(m.pointer.as_deref(), Some("/links/0/endpoints/1"));

    let doc = r#"{"version":1,"locations":[
        {"id":"a","kind":"File","path":"a","parent":"b"},
        {"id":"b","kind":"File","path":"b","parent":"a"}]}"#;
    let ModelError::Malformed(m) = TraceabilityInformation::load(doc).unwrap_err() else { panic!() };
    assert!(m.message.contains("cyclic"), "{}", m.message);

    assert!(TraceabilityInformation::load(r#"{"version":1,"extra":0}"#).is_err());
}

#[test]
fn mutations_bump_the_revision() {
    let mut info = TraceabilityInformation::new();
    info.add_location(TraceLocation::file("a", "a.txt")).unwrap();
    info.add_location(TraceLocation::file("b", "b.txt")).unwrap();
    assert_eq!(info.revision, 2);
    assert_eq!(
        info.add_location(TraceLocation::file("a", "x.txt")),
        Err(ModelError::DuplicateId("a".into()))
    );
    let link = |id: &str, eps: &[&str]| TraceLink {
        id: id.into(),
        endpoints: eps.iter().map(|s| s.to_string()).collect(),
        relation: None,
        origin: Origin::Manual,
    };
    assert_eq!(info.add_link(link("l", &["a"])), Err(ModelError::TooFewEndpoints));
    assert_eq!(info.add_link(link("l", &["a", "c"])), Err(ModelError::UnknownLocation("c".into())));
    info.add_link(link("l", &["a", "b"])).unwrap();
    assert_eq!(info.revision, 3);
    assert_eq!(info.fresh_id("l"), "l1");
    assert_eq!(info.remove_link("l").unwrap().id, "l");
    assert_eq!(info.remove_link("l"), Err(ModelError::UnknownLink("l".into())));
    assert_eq!(info.revision, 4);
}

#[test]
fn typing_and_relational_view() {
    let spec = load_spec(&data("sidp.forl")).unwrap();
    let mut info = TraceabilityInformation::new();
    for id in ["r", "s"] {
        info.add_location(TraceLocation::file(id, "doc.txt")).unwrap();
    }
    assert_eq!(
        info.assign_type(&spec, "r", "Artifact"),
        Err(ModelError::AbstractSignature("Artifact".into()))
    );
    assert_eq!(
        info.assign_type(&spec, "r", "Nope"),
        Err(ModelError::UnknownSignature("Nope".into()))
    );
    let info = info.assign_type(&spec, "r", "Requirement").unwrap();
    let mut info = info.assign_type(&spec, "s", "Specification").unwrap();
    let link = TraceLink {
        id: "l1".into(),
        endpoints: vec!["r".into(), "s".into()],
        relation: None,
        origin: Origin::Manual,
    };
    let candidates = info.approximate_link_type(&spec, &link).unwrap();
    assert_eq!(candidates, ["requires", "refines", "contains", "equals", "conflicts"]);
    info.add_link(TraceLink { relation: Some("refines".into()), ..link }).unwrap();
    let inst = info.to_relational(&spec).unwrap();
    assert_eq!(inst.value(&spec, "Artifact").unwrap().len(), 2);
    assert_eq!(inst.value(&spec, "Requirement").unwrap().len(), 1);
    assert_eq!(inst.value(&spec, "refines").unwrap().len(), 1);

    let (next, acc) = info.accept_trace(&spec, "requires", &["s".into(), "r".into()]).unwrap();
    assert_eq!(acc, Accepted::Added { link: "rl1".into() });
    assert_eq!(next.revision, info.revision + 1);
    assert_eq!(next.link("rl1").unwrap().origin, Origin::Rl);
    let (same, acc) = next.accept_trace(&spec, "requires", &["s".into(), "r".into()]).unwrap();
    assert_eq!(acc, Accepted::Duplicate { link: "rl1".into() });
    assert_eq!(same, next);
    assert!(matches!(
        info.accept_trace(&spec, "requires", &["s".into()]),
        Err(ModelError::TypeViolation(_))
    ));
    assert!(matches!(
        info.accept_trace(&spec, "Requirement", &["s".into(), "r".into()]),
        Err(ModelError::UnknownRelation(_))
    ));
}

#[test]
fn untyped_endpoints_and_unknown_relations_are_rejected() {
    let spec = load_spec(&data("sidp.forl")).unwrap();
    let mut info = TraceabilityInformation::load(&data("table1.trace.json")).unwrap();
    info.add_location(TraceLocation::file("x", "x.txt")).unwrap();
    let mut bad = info.clone();
    bad.add_link(TraceLink {
        id: "z".into(),
        endpoints: vec!["r1".into(), "x".into()],
        relation: Some("requires".into()),
        origin: Origin::Manual,
    })
    .unwrap();
    assert!(matches!(bad.to_relational(&spec), Err(ModelError::UntypedEndpoint { .. })));
    let mut bad = info.clone();
    bad.add_link(TraceLink {
        id: "z".into(),
        endpoints: vec!["r1".into(), "r2".into()],
        relation: Some("satisfies".into()),
        origin: Origin::Manual,
    })
    .unwrap();
    assert_eq!(bad.to_relational(&spec).unwrap_err(), ModelError::UnknownRelation("satisfies".into()));
}

#[test]
fn broken_locations_are_flagged() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("doc.txt"), "0123456789").unwrap();
    let mut info = TraceabilityInformation::new();
    info.add_location(TraceLocation::text("ok", "doc.txt", 2, 8)).unwrap();
    info.add_location(TraceLocation::text("long", "doc.txt", 5, 6)).unwrap();
    info.add_location(TraceLocation::file("gone", "missing.txt")).unwrap();
    let flagged = info.mark_broken(dir.path());
    assert_eq!(flagged, ["gone", "long"]);
    assert!(!info.location("ok").unwrap().broken);
    assert!(info.mark_broken(dir.path()).is_empty());
}
