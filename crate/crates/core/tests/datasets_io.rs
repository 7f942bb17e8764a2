use std::collections::BTreeMap;
use std::fs;
use std::io::Cursor;
use std::path::{Path, PathBuf};

use spectral_bsa::datasets::{
    count_routes, from_json, generate_clustered, generate_two_parameter, ingest_openflights, load,
    save, to_json, RegionMapping,
};
use spectral_bsa::{spectral_distance, Error};

const AIRPORTS: &str = "\
1,\"A\",\"Paris\",\"France\",\"AAA\",\"LFAA\",0,0,0,1,\"E\",\"x\",\"airport\",\"test\"
2,\"B\",\"Rome\",\"Italy\",\"BBB\",\"LIBB\",0,0,0,1,\"E\",\"x\",\"airport\",\"test\"
3,\"C, the third\",\"Cairo\",\"Egypt\",\"CCC\",\"HECC\",0,0,0,1,\"E\",\"x\",\"airport\",\"test\"
4,\"D\",\"New York\",\"United States\",\"DDD\",\"KDDD\",0,0,0,1,\"E\",\"x\",\"airport\",\"test\"
5,\"E\",\"Tokyo\",\"Japan\",\"EEE\",\\N,0,0,0,1,\"E\",\"x\",\"airport\",\"test\"
";

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn codes(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

#[test]
fn counts_partition_the_routes() {
    let routes = "\
AA,1,AAA,1,BBB,2,,0,320
AA,1,BBB,\\N,CCC,\\N,,0,320
AA,1,AAA,1,DDD,4,,0,320
AA,1,AAA,1,ZZZ,99,,0,320
BB,2,DDD,4,EEE,5,Y,1,777
";
    let mapping = RegionMapping::default_europe();
    let counts = count_routes(
        Cursor::new(routes),
        Cursor::new(AIRPORTS),
        &mapping,
        &codes(&["AA", "BB"]),
    )
    .unwrap();
    let aa = &counts["AA"];
    assert_eq!(
        (aa.total, aa.mapped, aa.unmapped, aa.unknown_airport),
        (4, 2, 1, 1)
    );
    assert_eq!(
        aa.cells.values().sum::<u64>() + aa.unmapped + aa.unknown_airport,
        aa.total
    );
    let bb = &counts["BB"];
    assert_eq!((bb.total, bb.mapped, bb.unmapped), (1, 0, 1));
}

#[test]
fn airline_outside_the_regions_gives_a_zero_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let airports = write(dir.path(), "airports.dat", AIRPORTS);
    let routes = write(
        dir.path(),
        "routes.dat",
        "BB,2,DDD,4,EEE,5,,0,777\nAA,1,AAA,1,BBB,2,,0,320\n",
    );
    let mapping = RegionMapping::default_europe();
    let d = ingest_openflights(&routes, &airports, &mapping, &codes(&["BB", "AA"])).unwrap();
    assert_eq!(d.len(), 2);
    assert!(d.networks()[0].adjacency().iter().all(|&w| w == 0.0));
    let mass: f64 = d.networks()[1].adjacency().upper_triangle().sum();
    assert_eq!(mass, 1.0);
    assert_eq!(d.meta["AA.routes"], "1");
}

#[test]
fn unknown_airlines_are_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let airports = write(dir.path(), "airports.dat", AIRPORTS);
    let routes = write(dir.path(), "routes.dat", "AA,1,AAA,1,BBB,2,,0,320\n");
    let mapping = RegionMapping::default_europe();
    let d = ingest_openflights(&routes, &airports, &mapping, &codes(&["QQ", "AA"])).unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(d.networks()[0].id(), "AA");
    let err = ingest_openflights(&routes, &airports, &mapping, &codes(&["QQ"])).unwrap_err();
    assert!(matches!(err, Error::EmptySelection));
}

#[test]
fn malformed_rows_report_their_line() {
    let dir = tempfile::tempdir().unwrap();
    let airports = write(dir.path(), "airports.dat", AIRPORTS);
    let routes = write(
        dir.path(),
        "routes.dat",
        "AA,1,AAA,1,BBB,2,,0,320\nAA,1,AAA\n",
    );
    let mapping = RegionMapping::default_europe();
    match ingest_openflights(&routes, &airports, &mapping, &codes(&["AA"])) {
        Err(Error::Parse { file, line, .. }) => {
            assert_eq!(file, "routes");
            assert_eq!(line, 2);
        }
        other => panic!("unexpected {other:?}"),
    }
    let bad_airports = write(dir.path(), "bad.dat", "1,\"A\",\"Paris\"\n");
    match ingest_openflights(&routes, &bad_airports, &mapping, &codes(&["AA"])) {
        Err(Error::Parse { file, line, .. }) => {
            assert_eq!(file, "airports");
            assert_eq!(line, 1);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn mappings_must_use_listed_regions() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "mapping.json",
        r#"{"regions": ["North"], "country_to_region": {"Norway": "North", "Chad": "South"}}"#,
    );
    match RegionMapping::load(&path) {
        Err(Error::Schema { pointer, .. }) => assert_eq!(pointer, "/country_to_region/Chad"),
        other => panic!("unexpected {other:?}"),
    }
    let mut map = BTreeMap::new();
    map.insert("Norway".to_string(), "North".to_string());
    assert!(RegionMapping::new(vec!["North".into()], map).is_ok());
}

#[test]
fn clustered_sample_is_well_separated() {
    let d = generate_clustered(5, 0.05, 42).unwrap();
    let labels = d.labels();
    let mut intra: f64 = 0.0;
    let mut inter = f64::INFINITY;
    for i in 0..d.len() {
        for j in (i + 1)..d.len() {
            let dist = spectral_distance(&d.networks()[i], &d.networks()[j]).unwrap();
            if labels[i] == labels[j] {
                intra = intra.max(dist);
            } else {
                inter = inter.min(dist);
            }
        }
    }
    assert!(inter > intra, "inter {inter} <= intra {intra}");
}

#[test]
fn datasets_round_trip_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    for d in [
        generate_clustered(5, 0.05, 42).unwrap(),
        generate_two_parameter(16, 7).unwrap(),
    ] {
        let path = dir.path().join("d.json");
        save(&d, &path).unwrap();
        let back = load(&path).unwrap();
        assert_eq!(back, d);
        for (a, b) in back.networks().iter().zip(d.networks()) {
            assert!(a
                .adjacency()
                .iter()
                .zip(b.adjacency().iter())
                .all(|(x, y)| x.to_bits() == y.to_bits()));
        }
        assert_eq!(to_json(&back).unwrap(), to_json(&d).unwrap());
    }
}

#[test]
fn schema_violations_are_located() {
    let cases = [
        (r#"[]"#, ""),
        (r#"{"networks": []}"#, "/n"),
        (r#"{"n": 1, "networks": []}"#, "/networks"),
        (
            r#"{"n": 1, "networks": [{"adjacency": [[0]]}]}"#,
            "/networks/0/id",
        ),
        (
            r#"{"n": 1, "networks": [{"id": "a", "label": 3, "adjacency": [[0]]}]}"#,
            "/networks/0/label",
        ),
        (
            r#"{"n": 2, "networks": [{"id": "a", "adjacency": [[0, 1]]}]}"#,
            "/networks/0/adjacency",
        ),
        (
            r#"{"n": 2, "networks": [{"id": "a", "adjacency": [[0, 1], [1]]}]}"#,
            "/networks/0/adjacency/1",
        ),
        (
            r#"{"n": 1, "networks": [{"id": "a", "adjacency": [["x"]]}]}"#,
            "/networks/0/adjacency/0/0",
        ),
        (
            r#"{"n": 1, "networks": [{"id": "a", "adjacency": [[0]]}], "meta": {"k": 1}}"#,
            "/meta/k",
        ),
    ];
    for (text, expected) in cases {
        match from_json(text) {
            Err(Error::Schema { pointer, .. }) => assert_eq!(pointer, expected, "{text}"),
            other => panic!("{text}: unexpected {other:?}"),
        }
    }
}

#[test]
fn frozen_sample_has_twelve_airlines() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let mapping = RegionMapping::load(root.join("regions.json")).unwrap();
    assert_eq!(mapping, RegionMapping::default_europe());
    let airlines = codes(&[
        "U2", "FR", "LX", "AF", "SU", "AZ", "LH", "BA", "KL", "IB", "TK", "W6",
    ]);
    let d = ingest_openflights(
        root.join("routes.dat"),
        root.join("airports.dat"),
        &mapping,
        &airlines,
    )
    .unwrap();
    assert_eq!(d.len(), 12);
    assert_eq!(d.n(), 6);
    for g in d.networks() {
        let mass: f64 = g.adjacency().upper_triangle().sum();
        assert!(mass <= 1.0 + 1e-12);
        assert!(g.adjacency().iter().all(|&w| w >= 0.0));
    }
}
