use gray_hilbert::curve::Scheme;
use gray_hilbert::ingest::{load_reader, AttributeSpec, IngestOptions};
use gray_hilbert::metrics::{static_k, IndexMetrics};
use gray_hilbert::stats::tail_ccdf;
use gray_hilbert::synth::{generate, write_csv, Family, SynthSpec};
use gray_hilbert::tree::{build_scaled, static_profile, TreeDocument, DEFAULT_MAX_BITS};

fn unit_attrs(n: usize) -> Vec<AttributeSpec> {
    (0..n).map(|i| format!("x{i}:unit").parse().unwrap()).collect()
}

#[test]
fn synth_csv_reingests_bit_identically() {
    for family in Family::ALL {
        let cloud = generate(&SynthSpec::new(family, 3, 300, 5)).unwrap();
        let mut csv = Vec::new();
        write_csv(&cloud, &mut csv).unwrap();
        let options = IngestOptions {
            id_column: Some("id".into()),
            ..IngestOptions::default()
        };
        let (back, report) = load_reader(csv.as_slice(), &unit_attrs(3), &options).unwrap();
        assert_eq!(back, cloud, "{family}");
        assert_eq!(report.rows_kept, 300);
    }
}

#[test]
fn metrics_recompute_from_exported_tree() {
    let cloud = generate(&SynthSpec::new(Family::LognormalCluster, 2, 3000, 9)).unwrap();
    for scheme in Scheme::ALL {
        for s in [1, 2, 4] {
            let direct = IndexMetrics::compute(&cloud, s, scheme, DEFAULT_MAX_BITS).unwrap();
            let tree = build_scaled(&cloud, s, scheme, DEFAULT_MAX_BITS).unwrap();
            let doc = TreeDocument::from_json(&TreeDocument::from_tree(&tree).to_json().unwrap()).unwrap();
            let k = static_k(cloud.len() as u64, s as u64, 2);
            let profile = static_profile(&cloud, k, s).unwrap();
            let again = IndexMetrics::from_parts(doc.leaf_counts(), &profile, cloud.len(), s, scheme).unwrap();
            assert_eq!(direct, again);
        }
    }
}

#[test]
fn mixed_attribute_kinds_build_a_tree() {
    let csv = "site,species,day,height\n\
               1,oak,2001-05-01,12.5\n\
               2,ash,2001-05-02,NA\n\
               3,beech,2001-06-11,7.0\n\
               4,oak,2002-01-30,3.25\n\
               5,ash,2003-03-03,20\n";
    let attrs: Vec<AttributeSpec> = ["species:cat", "day:date", "height"]
        .iter()
        .map(|a| a.parse().unwrap())
        .collect();
    let options = IngestOptions {
        id_column: Some("site".into()),
        ..IngestOptions::default()
    };
    let (cloud, report) = load_reader(csv.as_bytes(), &attrs, &options).unwrap();
    assert_eq!(cloud.len(), 4);
    assert_eq!(report.rows_read, report.rows_kept + report.rows_dropped);
    assert_eq!(cloud.ids(), &[1, 3, 4, 5]);
    let json: serde_json::Value = serde_json::from_str(&report.to_json().unwrap()).unwrap();
    assert_eq!(json["attributes"][0]["distinct_values"], 3);
    assert!(json["attributes"][0]["codes"]["oak"].is_number());

    let tree = build_scaled(&cloud, 1, Scheme::Bubble, DEFAULT_MAX_BITS).unwrap();
    let mut ids = tree.ordered_ids();
    ids.sort_unstable();
    assert_eq!(ids, vec![1, 3, 4, 5]);
}

#[test]
fn ccdf_of_small_multiset() {
    let tail = tail_ccdf(&[1.0, 1.0, 2.0, 3.0]).unwrap();
    assert_eq!(tail.to_csv().unwrap(), "x,ccdf\n1,1\n2,0.5\n3,0.25\n");
}

#[test]
fn uniform_cells_survive_longer_at_probability_one() {
    // occupancy tails of the static grid: a uniform cloud keeps P(X >= x) near
    // 1 for longer and then drops sharply; a clustered cloud decays slowly
    let n = 2;
    let len = 20_000;
    let uniform = generate(&SynthSpec::new(Family::Uniform, n, len, 3)).unwrap();
    let clustered = generate(&SynthSpec::new(Family::LognormalCluster, n, len, 3)).unwrap();
    let k = 5;
    let tail = |cloud| {
        let profile = static_profile(cloud, k, 1).unwrap();
        let values: Vec<f64> = profile.cell_counts.iter().map(|&c| c as f64).collect();
        tail_ccdf(&values).unwrap()
    };
    let (u, c) = (tail(&uniform), tail(&clustered));
    let at = |t: &gray_hilbert::stats::TailDistribution, x: f64| {
        t.x.iter().zip(&t.ccdf).take_while(|(v, _)| **v <= x).last().map_or(1.0, |(_, p)| *p)
    };
    // mean occupancy is ~20 per cell for the uniform cloud
    assert!(at(&u, 10.0) > 0.95);
    assert!(at(&c, 10.0) < at(&u, 10.0));
    assert!(u.x.last().unwrap() < c.x.last().unwrap());
}
