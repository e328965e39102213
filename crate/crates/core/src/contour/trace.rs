use super::{Contour, ContourSource, PixelPoint};
use crate::raster::{connected_components, BinaryGrid, Connectivity};

// Clockwise on screen (y down), starting west.
const RING: [(i64, i64); 8] = [
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
];

fn ring_index(dx: i64, dy: i64) -> usize {
    RING.iter()
        .position(|&o| o == (dx, dy))
        .expect("offset is not an 8-neighbor")
}

/// Moore-neighbor tracing with Jacob's stopping criterion.
///
/// One contour per 8-connected component, started at the component's
/// row-major-first pixel (entered from the west) and walked clockwise.
/// Points repeat where the walk passes through a one-pixel-wide neck or spur.
pub fn trace_outer_contours(mask: &BinaryGrid) -> Vec<Contour> {
    let labels = connected_components(mask, Connectivity::Eight);
    let w = mask.width();
    let mut sizes = vec![0usize; labels.max_label() as usize + 1];
    for &l in labels.cells() {
        sizes[l as usize] += 1;
    }

    let mut seen = vec![false; sizes.len()];
    let mut contours = Vec::with_capacity(sizes.len().saturating_sub(1));
    for (i, &l) in labels.cells().iter().enumerate() {
        if l == 0 || seen[l as usize] {
            continue;
        }
        seen[l as usize] = true;
        let start = PixelPoint::new((i % w) as i64, (i / w) as i64);
        let points = trace_from(mask, start, sizes[l as usize]);
        contours.push(Contour {
            per_point_be: vec![0.0; points.len()],
            points,
            source: ContourSource::Outer,
        });
    }
    contours
}

fn trace_from(mask: &BinaryGrid, start: PixelPoint, component_size: usize) -> Vec<PixelPoint> {
    let fg = |p: PixelPoint| mask.get_signed(p.x, p.y).unwrap_or(false);
    let mut points = vec![start];
    let mut cur = start;
    let mut backtrack = 0; // west is background for the scan-first pixel
    // The walk is closed once the first step (pixel and backtrack) recurs;
    // the start pixel itself may be re-entered with a different backtrack.
    let mut first_step = None;
    let max_steps = 4 * component_size + 8;

    for step in 0..=max_steps {
        debug_assert!(step < max_steps, "contour walk from {start:?} did not close");
        let Some(k) = (1..=8).find(|&k| {
            let (dx, dy) = RING[(backtrack + k) % 8];
            fg(cur.offset(dx, dy))
        }) else {
            break; // isolated pixel
        };
        let dir = (backtrack + k) % 8;
        let (dx, dy) = RING[dir];
        let next = cur.offset(dx, dy);
        let (bx, by) = RING[(dir + 7) % 8];
        let bg = cur.offset(bx, by);
        let state = (next, ring_index(bg.x - next.x, bg.y - next.y));
        match first_step {
            None => first_step = Some(state),
            Some(first) if first == state => {
                debug_assert_eq!(cur, start);
                points.pop();
                break;
            }
            Some(_) => {}
        }
        points.push(next);
        cur = next;
        backtrack = state.1;
    }
    points
}
