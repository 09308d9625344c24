//! Static SVG line chart of the mood timeline: bin index on x, mean emotion
//! on y, with a dashed zero line. Output is plain text with fixed-precision
//! coordinates, so identical timelines render byte-identically.

use moodmetric::timeline::MoodTimeline;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 260.0;
const LEFT: f64 = 50.0;
const RIGHT: f64 = 700.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 220.0;

fn x_of(bin: usize, k: usize) -> f64 {
    LEFT + (bin as f64 + 0.5) * (RIGHT - LEFT) / k as f64
}

fn y_of(mean: f64) -> f64 {
    let mid = (TOP + BOTTOM) / 2.0;
    mid - mean * (BOTTOM - TOP) / 2.0
}

pub fn timeline_svg(timeline: &MoodTimeline) -> String {
    let k = timeline.intervals.len();
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // axes
    svg.push_str(&format!(
        "  <line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{BOTTOM}\" stroke=\"black\"/>\n"
    ));
    svg.push_str(&format!(
        "  <line x1=\"{LEFT}\" y1=\"{BOTTOM}\" x2=\"{RIGHT}\" y2=\"{BOTTOM}\" stroke=\"black\"/>\n"
    ));

    // zero line and y labels
    let zero_y = y_of(0.0);
    svg.push_str(&format!(
        "  <line x1=\"{LEFT}\" y1=\"{zero_y}\" x2=\"{RIGHT}\" y2=\"{zero_y}\" stroke=\"#999\" stroke-dasharray=\"4 4\"/>\n"
    ));
    for (label, value) in [("+1", 1.0), ("0", 0.0), ("-1", -1.0)] {
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{label}</text>\n",
            LEFT - 6.0,
            y_of(value) + 4.0
        ));
    }

    if k > 0 {
        // polyline segments across consecutive defined bins; empty bins
        // break the line
        let mut segment: Vec<String> = Vec::new();
        let flush = |segment: &mut Vec<String>, svg: &mut String| {
            if segment.len() >= 2 {
                svg.push_str(&format!(
                    "  <polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n",
                    segment.join(" ")
                ));
            }
            segment.clear();
        };
        for bin in &timeline.intervals {
            match bin.mean_emotion {
                Some(mean) => {
                    segment.push(format!("{:.2},{:.2}", x_of(bin.index, k), y_of(mean)));
                }
                None => flush(&mut segment, &mut svg),
            }
        }
        flush(&mut segment, &mut svg);

        for bin in &timeline.intervals {
            if let Some(mean) = bin.mean_emotion {
                svg.push_str(&format!(
                    "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#1f77b4\"/>\n",
                    x_of(bin.index, k),
                    y_of(mean)
                ));
            }
        }

        if k <= 30 {
            for bin in &timeline.intervals {
                svg.push_str(&format!(
                    "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
                    x_of(bin.index, k),
                    BOTTOM + 14.0,
                    bin.index
                ));
            }
        }
    }

    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">interval</text>\n",
        (LEFT + RIGHT) / 2.0,
        HEIGHT - 8.0
    ));
    svg.push_str("</svg>\n");
    svg
}
