use nnavg::csv_io::{read_panel, write_panel};
use nnavg_core::series::{Panel, TimeSeries};
use proptest::prelude::*;

fn panel_strategy() -> impl Strategy<Value = Panel> {
    prop::collection::vec((1i64..20, prop::collection::vec(-1e6f64..1e6, 1..12)), 1..6).prop_map(|parts| {
        Panel::new(parts.into_iter().enumerate().map(|(i, (start, v))| TimeSeries::new(format!("s{i}"), start, v).unwrap()))
            .unwrap()
    })
}

proptest! {
    #[test]
    fn write_then_read_is_identity(panel in panel_strategy()) {
        let mut buf = Vec::new();
        write_panel(&panel, &mut buf).unwrap();
        let back = read_panel(buf.as_slice()).unwrap();
        prop_assert_eq!(back, panel);
    }
}
