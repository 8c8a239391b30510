//! ASCII PLY and CSV readers/writers for clouds and trajectories.
//!
//! Numbers are written with 9 significant digits in scientific notation, so a
//! write → read → write cycle reproduces the file byte for byte.

use std::io::{BufRead, Write};

use nalgebra::Vector3;

use crate::cloud::{Frame, Label, LabeledCloud, PointCloud};
use crate::error::FormatError;
use crate::geometry::Pose6D;

/// Formats a value with 9 significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.8e}")
}

fn parse_f64(s: &str, line: usize) -> Result<f64, FormatError> {
    s.trim().parse::<f64>().map_err(|e| FormatError::Parse {
        line,
        msg: format!("bad number {s:?}: {e}"),
    })
}

fn parse_label(s: &str, line: usize) -> Result<Label, FormatError> {
    s.trim()
        .parse::<u8>()
        .ok()
        .and_then(Label::from_code)
        .ok_or_else(|| FormatError::Parse {
            line,
            msg: format!("bad label {s:?}"),
        })
}

/// A cloud read back from disk; labels are present when the file had them.
#[derive(Debug, Clone, PartialEq)]
pub struct CloudFile {
    pub cloud: PointCloud,
    pub labels: Option<Vec<Label>>,
}

impl CloudFile {
    pub fn into_labeled(self) -> Option<LabeledCloud> {
        let labels = self.labels?;
        LabeledCloud::new(self.cloud, labels).ok()
    }
}

/// CSV with header `x,y,z[,label]`.
pub fn write_cloud_csv<W: Write>(
    mut w: W,
    cloud: &PointCloud,
    labels: Option<&[Label]>,
) -> Result<(), FormatError> {
    if labels.is_some() {
        writeln!(w, "x,y,z,label")?;
    } else {
        writeln!(w, "x,y,z")?;
    }
    for (i, p) in cloud.points.iter().enumerate() {
        write!(w, "{},{},{}", fmt_num(p.x), fmt_num(p.y), fmt_num(p.z))?;
        if let Some(l) = labels {
            write!(w, ",{}", l[i].code())?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn read_cloud_csv<R: BufRead>(r: R, frame: Frame) -> Result<CloudFile, FormatError> {
    let mut lines = r.lines().enumerate();
    let header = match lines.next() {
        Some((_, l)) => l?,
        None => {
            return Err(FormatError::Parse {
                line: 1,
                msg: "missing header".into(),
            })
        }
    };
    let labeled = match header.trim() {
        "x,y,z" => false,
        "x,y,z,label" => true,
        other => {
            return Err(FormatError::Parse {
                line: 1,
                msg: format!("unexpected header {other:?}"),
            })
        }
    };
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let n = i + 1;
        let fields: Vec<&str> = line.split(',').collect();
        let expected = if labeled { 4 } else { 3 };
        if fields.len() != expected {
            return Err(FormatError::Parse {
                line: n,
                msg: format!("expected {expected} fields, got {}", fields.len()),
            });
        }
        points.push(Vector3::new(
            parse_f64(fields[0], n)?,
            parse_f64(fields[1], n)?,
            parse_f64(fields[2], n)?,
        ));
        if labeled {
            labels.push(parse_label(fields[3], n)?);
        }
    }
    Ok(CloudFile {
        cloud: PointCloud::new(points, frame),
        labels: labeled.then_some(labels),
    })
}

fn frame_name(frame: Frame) -> &'static str {
    match frame {
        Frame::Laser => "laser",
        Frame::Robot => "robot",
        Frame::World => "world",
    }
}

/// ASCII PLY with `vertex` elements `x y z` and an optional `uchar label`.
pub fn write_ply<W: Write>(
    mut w: W,
    cloud: &PointCloud,
    labels: Option<&[Label]>,
) -> Result<(), FormatError> {
    writeln!(w, "ply")?;
    writeln!(w, "format ascii 1.0")?;
    writeln!(w, "comment frame {}", frame_name(cloud.frame))?;
    writeln!(w, "element vertex {}", cloud.len())?;
    writeln!(w, "property double x")?;
    writeln!(w, "property double y")?;
    writeln!(w, "property double z")?;
    if labels.is_some() {
        writeln!(w, "property uchar label")?;
    }
    writeln!(w, "end_header")?;
    for (i, p) in cloud.points.iter().enumerate() {
        write!(w, "{} {} {}", fmt_num(p.x), fmt_num(p.y), fmt_num(p.z))?;
        if let Some(l) = labels {
            write!(w, " {}", l[i].code())?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn read_ply<R: BufRead>(r: R) -> Result<CloudFile, FormatError> {
    let mut lines = r.lines();
    let mut n = 0usize;
    let mut next_line = |lines: &mut std::io::Lines<R>| -> Result<Option<String>, FormatError> {
        n += 1;
        Ok(lines.next().transpose()?)
    };
    let bad = |line: usize, msg: &str| FormatError::Parse {
        line,
        msg: msg.to_string(),
    };

    if next_line(&mut lines)?.as_deref().map(str::trim) != Some("ply") {
        return Err(bad(1, "missing ply magic"));
    }
    let mut frame = Frame::World;
    let mut count: Option<usize> = None;
    let mut props: Vec<String> = Vec::new();
    let mut in_vertex = false;
    let mut line_no = 1;
    loop {
        line_no += 1;
        let line = next_line(&mut lines)?.ok_or_else(|| bad(line_no, "unterminated header"))?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            ["end_header"] => break,
            ["format", "ascii", _] => {}
            ["format", ..] => return Err(bad(line_no, "only ascii PLY is supported")),
            ["comment", "frame", name] => {
                frame = match *name {
                    "laser" => Frame::Laser,
                    "robot" => Frame::Robot,
                    _ => Frame::World,
                }
            }
            ["comment", ..] | ["obj_info", ..] => {}
            ["element", "vertex", c] => {
                count = Some(c.parse().map_err(|_| bad(line_no, "bad vertex count"))?);
                in_vertex = true;
            }
            ["element", ..] => in_vertex = false,
            ["property", _ty, name] if in_vertex => props.push(name.to_string()),
            ["property", ..] => {}
            _ => return Err(bad(line_no, "unrecognised header line")),
        }
    }
    let count = count.ok_or_else(|| bad(line_no, "no vertex element"))?;
    let idx = |name: &str| props.iter().position(|p| p == name);
    let (ix, iy, iz) = match (idx("x"), idx("y"), idx("z")) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => return Err(bad(line_no, "vertex element needs x, y and z")),
    };
    let il = idx("label");

    let mut points = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(if il.is_some() { count } else { 0 });
    for _ in 0..count {
        line_no += 1;
        let line = next_line(&mut lines)?.ok_or_else(|| bad(line_no, "truncated vertex list"))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < props.len() {
            return Err(bad(line_no, "short vertex line"));
        }
        points.push(Vector3::new(
            parse_f64(fields[ix], line_no)?,
            parse_f64(fields[iy], line_no)?,
            parse_f64(fields[iz], line_no)?,
        ));
        if let Some(il) = il {
            labels.push(parse_label(fields[il], line_no)?);
        }
    }
    Ok(CloudFile {
        cloud: PointCloud::new(points, frame),
        labels: il.map(|_| labels),
    })
}

/// A time-stamped pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedPose {
    pub t: f64,
    pub pose: Pose6D,
}

/// CSV with header `t,x,y,z,theta,alpha,phi`.
pub fn write_trajectory_csv<W: Write>(mut w: W, traj: &[TimedPose]) -> Result<(), FormatError> {
    writeln!(w, "t,x,y,z,theta,alpha,phi")?;
    for s in traj {
        let p = &s.pose;
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            fmt_num(s.t),
            fmt_num(p.x),
            fmt_num(p.y),
            fmt_num(p.z),
            fmt_num(p.theta),
            fmt_num(p.alpha),
            fmt_num(p.phi)
        )?;
    }
    Ok(())
}

pub fn read_trajectory_csv<R: BufRead>(r: R) -> Result<Vec<TimedPose>, FormatError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if i == 0 {
            if line.trim() != "t,x,y,z,theta,alpha,phi" {
                return Err(FormatError::Parse {
                    line: 1,
                    msg: "unexpected trajectory header".into(),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let v: Vec<f64> = line
            .split(',')
            .map(|f| parse_f64(f, i + 1))
            .collect::<Result<_, _>>()?;
        if v.len() != 7 {
            return Err(FormatError::Parse {
                line: i + 1,
                msg: "expected 7 fields".into(),
            });
        }
        out.push(TimedPose {
            t: v[0],
            pose: Pose6D {
                x: v[1],
                y: v[2],
                z: v[3],
                theta: v[4],
                alpha: v[5],
                phi: v[6],
            },
        });
    }
    Ok(out)
}
