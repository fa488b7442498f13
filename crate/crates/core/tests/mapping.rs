use proptest::prelude::*;

use ringvcs_core::geometry::{AreaFractions, RingModelParams};
use ringvcs_core::mapper::{assign_coordinate, project_to_curve, MappingResult, NeighborCensus};
use ringvcs_core::table::{build_offset_table, OffsetTable, TableEntry};

const R: f64 = 10.0;

fn table(n: u32, step: f64) -> OffsetTable {
    build_offset_table(&RingModelParams::new(R, n).unwrap(), step).unwrap()
}

fn census(n: u32) -> impl Strategy<Value = NeighborCensus> {
    (1u32..40, 0u32..40, 0u32..40).prop_map(move |(i, s, o)| NeighborCensus::new(n, i, s, o))
}

fn simplex_point() -> impl Strategy<Value = AreaFractions> {
    (0.0f64..1.0, 0.0f64..1.0).prop_map(|(u, v)| {
        let (a, b) = if u + v > 1.0 { (1.0 - u, 1.0 - v) } else { (u, v) };
        AreaFractions::new(a, b, 1.0 - a - b)
    })
}

/// Exhaustive nearest-entry scan, independent of the library's projection.
fn brute_force_nearest(p: &AreaFractions, entries: &[TableEntry]) -> usize {
    let d = |e: &TableEntry| {
        let [x, y, z] = e.fractions.as_array();
        ((p.inner - x).powi(2) + (p.same - y).powi(2) + (p.outer - z).powi(2)).sqrt()
    };
    let best = entries.iter().map(d).fold(f64::INFINITY, f64::min);
    entries.iter().position(|e| d(e) == best).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn distinct_entries_never_merge(n in 1u32..6, step_idx in 0usize..4, a in census(0), b in census(0)) {
        let step = [0.1, 0.25, 1.0, 3.0][step_idx];
        let t = table(n, step);
        let a = NeighborCensus { ring: n, ..a };
        let b = NeighborCensus { ring: n, ..b };
        let ma = assign_coordinate(&a, &t, R).unwrap();
        let mb = assign_coordinate(&b, &t, R).unwrap();
        prop_assert!(ma.scaled_distance < step);
        prop_assert!(mb.scaled_distance < step);
        if ma.matched_offset != mb.matched_offset {
            prop_assert_ne!(ma.coordinate, mb.coordinate);
        }
        // Equal coordinates happen exactly for equal entry and distance.
        let same_parts = ma.matched_offset == mb.matched_offset
            && ma.projection_distance == mb.projection_distance;
        prop_assert_eq!(ma.coordinate == mb.coordinate, same_parts);
    }

    #[test]
    fn coordinates_stay_in_their_ring(n in 1u32..8, c in census(0), step_idx in 0usize..4) {
        let step = [0.1, 0.3, 0.7, 3.0][step_idx];
        let t = table(n, step);
        let c = NeighborCensus { ring: n, ..c };
        let m = assign_coordinate(&c, &t, R).unwrap();
        let base = f64::from(n - 1) * R;
        prop_assert!(m.coordinate >= base && m.coordinate < base + R, "{:?}", m);
        prop_assert_eq!(MappingResult::ring_from_coordinate(m.coordinate, R), n);
        prop_assert_eq!(m.coordinate, base + m.matched_offset + m.scaled_distance);
        prop_assert!(m.projection_distance >= 0.0 && m.projection_distance <= std::f64::consts::SQRT_2);
        let again = assign_coordinate(&c, &t, R).unwrap();
        prop_assert_eq!(m.coordinate.to_bits(), again.coordinate.to_bits());
    }

    #[test]
    fn projection_matches_linear_scan(p in simplex_point(), e in proptest::collection::vec(simplex_point(), 3)) {
        let entries: Vec<TableEntry> = e
            .into_iter()
            .enumerate()
            .map(|(i, fractions)| TableEntry { offset: 3.0 * i as f64, fractions })
            .collect();
        let t = OffsetTable::from_entries(2, R, 3.0, entries.clone()).unwrap();
        let proj = project_to_curve(&p, &t).unwrap();
        prop_assert_eq!(proj.index, brute_force_nearest(&p, &entries));
    }

    #[test]
    fn projection_on_real_tables_matches_linear_scan(n in 1u32..6, p in simplex_point()) {
        let t = table(n, 0.5);
        let proj = project_to_curve(&p, &t).unwrap();
        prop_assert_eq!(proj.index, brute_force_nearest(&p, t.entries()));
    }
}
