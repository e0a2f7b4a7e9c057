use std::io::Write;

use super::sim::SimulationTrace;

/// Writes a trace as CSV: `t,<bus ids...>,q_<bems ids>...`, one row per step,
/// every number with 6 decimals.
pub fn write_trace_csv<W: Write>(trace: &SimulationTrace, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_owned()];
    header.extend(trace.bus_ids.iter().cloned());
    header.extend(trace.bems_ids.iter().map(|b| format!("q_{b}")));
    w.write_record(&header)?;
    for k in 0..trace.len() {
        let mut row = vec![format!("{:.6}", trace.times[k])];
        row.extend(trace.voltages[k].iter().map(|v| format!("{v:.6}")));
        row.extend(trace.setpoints[k].iter().map(|q| format!("{q:.6}")));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_rows() {
        let trace = SimulationTrace {
            dt: 0.1,
            bus_ids: vec!["B0".into(), "B1".into()],
            bems_ids: vec!["B1".into()],
            times: vec![0.0, 0.1],
            voltages: vec![vec![230.0, 225.5], vec![230.0, 226.25]],
            setpoints: vec![vec![0.0], vec![120.5]],
            ages: vec![vec![0], vec![0]],
        };
        let mut buf = Vec::new();
        write_trace_csv(&trace, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "t,B0,B1,q_B1\n\
             0.000000,230.000000,225.500000,0.000000\n\
             0.100000,230.000000,226.250000,120.500000\n"
        );
    }
}
