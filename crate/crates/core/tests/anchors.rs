use elliptic_identities::identity_suite::build_catalog;

#[test]
fn every_citation_is_anchored() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/identity_anchors.txt");
    let anchors = std::fs::read_to_string(path).expect("anchor fixture");
    for case in build_catalog() {
        assert!(!case.citation.trim().is_empty(), "{} has an empty citation", case.id);
        assert!(anchors.contains(&case.citation), "{} citation not in fixture: {}", case.id, case.citation);
    }
}
