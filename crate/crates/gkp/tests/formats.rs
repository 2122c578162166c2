use gkp::formats::{
    distribution_from_json, distribution_to_json, read_grid_binary, write_distribution_csv, write_grid_binary,
    write_grid_csv, write_histogram_csv, FormatError,
};
use gkp::report::parse_header_cell;
use gkp_core::error_model::shift_distribution;
use gkp_core::montecarlo::Histogram;
use gkp_core::oracle::{make_codeword, Axis, Codeword, WaveGrid};
use gkp_core::{LogicalLabel, StateParams};
use num_complex::Complex64;

fn grid() -> WaveGrid {
    let axis = Axis::symmetric(3.0, 64).unwrap();
    WaveGrid::from_fn(axis, |x| Complex64::from_polar((-x * x).exp(), 0.7 * x + 0.1))
}

#[test]
fn binary_grid_round_trip_is_exact() {
    let g = grid();
    let mut buf = Vec::new();
    write_grid_binary(&mut buf, &g).unwrap();
    assert_eq!(buf.len(), 24 + 16 * 64);
    assert_eq!(&buf[0..8], &(-3.0f64).to_le_bytes());
    assert_eq!(&buf[16..24], &64u64.to_le_bytes());
    let back = read_grid_binary(buf.as_slice()).unwrap();
    assert_eq!(back, g);
}

#[test]
fn binary_grid_rejects_bad_input() {
    let mut buf = Vec::new();
    write_grid_binary(&mut buf, &grid()).unwrap();
    assert!(matches!(read_grid_binary(&buf[..buf.len() - 3]), Err(FormatError::Io(_))));
    let mut bad = buf.clone();
    bad[16..24].copy_from_slice(&48u64.to_le_bytes());
    assert!(matches!(read_grid_binary(bad.as_slice()), Err(FormatError::Invalid(_))));
    bad[16..24].copy_from_slice(&u64::MAX.to_le_bytes());
    assert!(matches!(read_grid_binary(bad.as_slice()), Err(FormatError::TooLong(_))));
}

#[test]
fn codeword_dump_survives_a_file() {
    let params = StateParams::symmetric(0.5).unwrap();
    let g = make_codeword(params, Codeword::Plus, Axis::symmetric(10.0, 256).unwrap()).unwrap();
    let mut file = tempfile::tempfile().unwrap();
    write_grid_binary(&mut file, &g).unwrap();
    use std::io::{Seek, SeekFrom};
    file.seek(SeekFrom::Start(0)).unwrap();
    assert_eq!(read_grid_binary(&file).unwrap(), g);
}

#[test]
fn grid_csv_has_units_and_one_row_per_point() {
    let mut buf = Vec::new();
    write_grid_csv(&mut buf, &grid()).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    let header: Vec<_> = lines.next().unwrap().split(',').map(|c| parse_header_cell(c).unwrap()).collect();
    assert_eq!(header, [("x", "1"), ("re", "1"), ("im", "1")]);
    assert_eq!(lines.count(), 64);
}

#[test]
fn distribution_json_round_trip_is_bit_exact() {
    for label in [LogicalLabel::Zero, LogicalLabel::One] {
        let d = shift_distribution(StateParams::new(0.25, 0.3).unwrap(), label, 32, 16).unwrap();
        let text = distribution_to_json(&d).unwrap();
        let back = distribution_from_json(&text).unwrap();
        assert_eq!(back.density.len(), d.density.len());
        for (a, b) in back.density.iter().zip(&d.density) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(back, d);
        assert_eq!(distribution_to_json(&back).unwrap(), text);
    }
}

#[test]
fn distribution_json_is_validated() {
    let d = shift_distribution(StateParams::symmetric(0.25).unwrap(), LogicalLabel::Zero, 16, 16).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&distribution_to_json(&d).unwrap()).unwrap();
    v["nu"] = 17.into();
    assert!(matches!(distribution_from_json(&v.to_string()), Err(FormatError::Invalid(_))));
    assert!(matches!(distribution_from_json("{"), Err(FormatError::Json(_))));
}

#[test]
fn distribution_csv_rows_sum_to_the_mass() {
    let d = shift_distribution(StateParams::symmetric(0.25).unwrap(), LogicalLabel::Zero, 32, 16).unwrap();
    let mut buf = Vec::new();
    write_distribution_csv(&mut buf, &d).unwrap();
    let mut rdr = csv::Reader::from_reader(buf.as_slice());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["u[1]", "v[1]", "density[1/area]"]);
    let mut sum = 0.0;
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let vals: Vec<f64> = rec.iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(vals[2].to_bits(), d.at(rows / 16, rows % 16).to_bits());
        sum += vals[2];
        rows += 1;
    }
    assert_eq!(rows, 32 * 16);
    assert!((sum * d.cell_area() - d.total_mass()).abs() < 1e-12);
}

#[test]
fn histogram_csv_bins_are_contiguous() {
    let h = Histogram { bin_width: 0.25, counts: vec![3, 0, 7] };
    let mut buf = Vec::new();
    write_histogram_csv(&mut buf, &h).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "residual_low[1],residual_high[1],count[steps]");
    assert_eq!(&lines[1..], ["0,0.25,3", "0.25,0.5,0", "0.5,0.75,7"]);
}
