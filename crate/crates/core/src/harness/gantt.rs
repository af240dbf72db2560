//! SVG Gantt charts of simulated runs: one lane per worker, a filled bar per
//! chunk and a second color for the time its request held the queue.

use std::fmt::Write as _;
use std::path::Path;

use super::HarnessError;
use crate::sim::SimResult;

const WIDTH: f64 = 1000.0;
const LANE: f64 = 24.0;
const LEFT: f64 = 48.0;
const TOP: f64 = 20.0;

pub fn render_gantt(result: &SimResult) -> String {
    let lanes = result.workers();
    let height = TOP + LANE * lanes as f64 + 24.0;
    let total = result.makespan.0.max(1) as f64;
    let x = |t: u64| LEFT + WIDTH * t as f64 / total;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{height}" viewBox="0 0 {w} {height}" font-family="monospace" font-size="11">"#,
        w = LEFT + WIDTH + 16.0,
    );
    s.push_str(
        "<style>.chunk{fill:#4a7ab5;stroke:#1d3557;stroke-width:0.5}.queue{fill:#e07a5f}</style>\n",
    );
    for w in 0..lanes {
        let y = TOP + LANE * w as f64;
        let _ = writeln!(s, r#"<text x="4" y="{:.1}">T{w}</text>"#, y + LANE * 0.65);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ccc"/>"##,
            LEFT + WIDTH
        );
    }
    for c in &result.chunk_log {
        let y = TOP + LANE * c.worker as f64 + 3.0;
        let h = LANE - 6.0;
        if c.t_begin > c.t_grant {
            let _ = writeln!(
                s,
                r#"<rect class="queue" x="{:.3}" y="{y:.1}" width="{:.3}" height="{h:.1}"/>"#,
                x(c.t_grant.0),
                x(c.t_begin.0) - x(c.t_grant.0),
            );
        }
        let _ = writeln!(
            s,
            r#"<rect class="chunk" x="{:.3}" y="{y:.1}" width="{:.3}" height="{h:.1}"><title>seq {} [{}, {}) {}..{}</title></rect>"#,
            x(c.t_begin.0),
            x(c.t_end.0) - x(c.t_begin.0),
            c.seq,
            c.start,
            c.start + c.size,
            c.t_begin,
            c.t_end,
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{LEFT}" y="{:.1}">0</text><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
        height - 6.0,
        LEFT + WIDTH,
        height - 6.0,
        result.makespan,
    );
    s.push_str("</svg>\n");
    s
}

pub fn emit_gantt(result: &SimResult, path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let path = path.as_ref();
    std::fs::write(path, render_gantt(result)).map_err(|e| HarnessError::io(path, e))
}
