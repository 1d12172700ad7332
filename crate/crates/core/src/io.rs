//! CSV emitters. Every file opens with a header row naming columns and
//! units; floats use Rust's shortest round-trip formatting so identical
//! inputs give byte-identical files.

use std::io::{self, Write};

use crate::channel::PulseTrain;
use crate::estimator::{DelayDopplerMap, Detection};
use crate::mac::MisalignmentCdf;
use crate::planner::CurvePoint;
use crate::waveform::ChipSequence;

/// `index,time_s,re,im`
pub fn write_sequence_csv<W: Write>(mut w: W, seq: &ChipSequence) -> io::Result<()> {
    writeln!(w, "index,time_s,re,im")?;
    let dt = 1.0 / seq.sample_rate();
    for (i, s) in seq.samples().iter().enumerate() {
        writeln!(w, "{i},{},{},{}", i as f64 * dt, s.re, s.im)?;
    }
    Ok(())
}

/// `pulse,sample,time_s,re,im` with time measured from the first pulse.
pub fn write_pulse_train_csv<W: Write>(mut w: W, train: &PulseTrain) -> io::Result<()> {
    writeln!(w, "pulse,sample,time_s,re,im")?;
    for (p, pulse) in train.pulses().iter().enumerate() {
        for (n, s) in pulse.iter().enumerate() {
            writeln!(w, "{p},{n},{},{},{}", train.sample_time(p, n), s.re, s.im)?;
        }
    }
    Ok(())
}

/// `delay_bin,doppler_bin,range_m,velocity_mps,magnitude`, row-major.
pub fn write_ddm_csv<W: Write>(mut w: W, ddm: &DelayDopplerMap) -> io::Result<()> {
    writeln!(w, "delay_bin,doppler_bin,range_m,velocity_mps,magnitude")?;
    for r in 0..ddm.range_bins() {
        let range = ddm.range_of_bin(r);
        for (k, m) in ddm.row(r).iter().enumerate() {
            writeln!(w, "{r},{k},{range},{},{m}", ddm.velocity_of_bin(k))?;
        }
    }
    Ok(())
}

/// `delay_bin,doppler_bin,range_m,velocity_mps,magnitude,snr_db`
pub fn write_detections_csv<W: Write>(mut w: W, detections: &[Detection]) -> io::Result<()> {
    writeln!(
        w,
        "delay_bin,doppler_bin,range_m,velocity_mps,magnitude,snr_db"
    )?;
    for d in detections {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            d.delay_bin, d.doppler_bin, d.range_m, d.velocity_mps, d.magnitude, d.snr_db
        )?;
    }
    Ok(())
}

/// `series,<x>,<y>` where the column names carry their units, e.g.
/// `pri_s` and `velocity_mps`.
pub fn write_curve_csv<W: Write>(
    mut w: W,
    x_col: &str,
    y_col: &str,
    points: &[CurvePoint],
) -> io::Result<()> {
    writeln!(w, "series,{x_col},{y_col}")?;
    for p in points {
        writeln!(w, "{},{},{}", p.series, p.x, p.y)?;
    }
    Ok(())
}

/// `position_m,probability`
pub fn write_cdf_csv<W: Write>(mut w: W, cdf: &MisalignmentCdf) -> io::Result<()> {
    writeln!(w, "position_m,probability")?;
    for (x, p) in cdf.position_m.iter().zip(&cdf.probability) {
        writeln!(w, "{x},{p}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn render(f: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> String {
        let mut buf = Vec::new();
        f(&mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn sequence_rows() {
        let seq = ChipSequence::from_bipolar(&[1, -1]).unwrap();
        let text = render(|b| write_sequence_csv(b, &seq));
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "index,time_s,re,im");
        assert_eq!(lines[1], "0,0,1,0");
        let fields: Vec<f64> = lines[2].split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields[0], 1.0);
        assert!((fields[1] - 1.0 / 1.76e9).abs() < 1e-24);
        assert_eq!(&fields[2..], &[-1.0, 0.0]);
    }

    #[test]
    fn curve_and_cdf_rows() {
        let pts = vec![CurvePoint {
            x: 1.5,
            y: 0.25,
            series: "a".into(),
        }];
        assert_eq!(
            render(|b| write_curve_csv(b, "p", "dv_mps", &pts)),
            "series,p,dv_mps\na,1.5,0.25\n"
        );
        let cdf = MisalignmentCdf {
            position_m: vec![0.0, 1.0],
            probability: vec![0.0, 0.5],
            trials: 2,
        };
        assert_eq!(
            render(|b| write_cdf_csv(b, &cdf)),
            "position_m,probability\n0,0\n1,0.5\n"
        );
    }

    #[test]
    fn pulse_train_rows() {
        let train = PulseTrain::new(vec![vec![Complex64::new(0.5, -0.5); 3]; 2], 2, 1e-5).unwrap();
        let text = render(|b| write_pulse_train_csv(b, &train));
        assert_eq!(text.lines().count(), 7);
        assert!(text.lines().nth(4).unwrap().starts_with("1,0,0.00001,"));
    }
}
