//! Ground-truth simulation world: landmarks plus wall and box obstacles.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::geometry::Pose2;

pub type LandmarkId = usize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Landmark {
    pub id: LandmarkId,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl Rect {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.xmin && x <= self.xmax && y >= self.ymin && y <= self.ymax
    }

    pub fn edges(&self) -> [Segment; 4] {
        let (a, b, c, d) = (self.xmin, self.ymin, self.xmax, self.ymax);
        [
            Segment::new(a, b, c, b),
            Segment::new(c, b, c, d),
            Segment::new(c, d, a, d),
            Segment::new(a, d, a, b),
        ]
    }
}

impl Segment {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        Self { x1, y1, x2, y2 }
    }

    /// Parameter `t` along the ray `origin + t·dir` where it meets this
    /// segment, if it does for some `t >= 0`.
    pub fn ray_hit(&self, ox: f64, oy: f64, dx: f64, dy: f64) -> Option<f64> {
        let ex = self.x2 - self.x1;
        let ey = self.y2 - self.y1;
        let denom = dx * ey - dy * ex;
        if denom.abs() < 1e-15 {
            return None;
        }
        let wx = self.x1 - ox;
        let wy = self.y1 - oy;
        let t = (wx * ey - wy * ex) / denom;
        let u = (wx * dy - wy * dx) / denom;
        (t >= 0.0 && (-1e-12..=1.0 + 1e-12).contains(&u)).then_some(t)
    }
}

/// The simulated environment. Obstacles are walls (segments) and solid boxes.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    landmarks: Vec<Landmark>,
    walls: Vec<Segment>,
    boxes: Vec<Rect>,
    bounds: Rect,
    start: Option<Pose2>,
}

impl World {
    pub fn new(bounds: Rect, landmarks: Vec<Landmark>, walls: Vec<Segment>, boxes: Vec<Rect>) -> Result<Self> {
        if !(bounds.xmax > bounds.xmin && bounds.ymax > bounds.ymin) {
            return Err(Error::invalid("world bounds are empty"));
        }
        let mut ids = HashSet::new();
        for l in &landmarks {
            if !ids.insert(l.id) {
                return Err(Error::invalid(format!("duplicate landmark id {}", l.id)));
            }
            if !bounds.contains(l.x, l.y) {
                return Err(Error::invalid(format!("landmark {} outside bounds", l.id)));
            }
        }
        Ok(Self {
            landmarks,
            walls,
            boxes,
            bounds,
            start: None,
        })
    }

    pub fn with_start(mut self, start: Pose2) -> Self {
        self.start = Some(start);
        self
    }

    pub fn landmarks(&self) -> &[Landmark] {
        &self.landmarks
    }

    pub fn walls(&self) -> &[Segment] {
        &self.walls
    }

    pub fn boxes(&self) -> &[Rect] {
        &self.boxes
    }

    pub fn bounds(&self) -> Rect {
        self.bounds
    }

    /// Declared start pose, or the center of the bounds facing +x.
    pub fn start(&self) -> Pose2 {
        self.start.unwrap_or_else(|| {
            Pose2::new(
                0.5 * (self.bounds.xmin + self.bounds.xmax),
                0.5 * (self.bounds.ymin + self.bounds.ymax),
                0.0,
            )
        })
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.walls
            .iter()
            .copied()
            .chain(self.boxes.iter().flat_map(|b| b.edges()))
    }

    /// Distance from `(ox, oy)` along unit direction `(dx, dy)` to the first
    /// obstacle surface.
    pub fn first_hit(&self, ox: f64, oy: f64, dx: f64, dy: f64) -> Option<f64> {
        self.segments()
            .filter_map(|s| s.ray_hit(ox, oy, dx, dy))
            .min_by(|a, b| a.total_cmp(b))
    }

    /// Whether the open segment from `a` to `b` crosses an obstacle. Contacts
    /// within `1e-9` of `b` do not count, so landmarks on a wall stay visible.
    pub fn occluded(&self, a: (f64, f64), b: (f64, f64)) -> bool {
        let dx = b.0 - a.0;
        let dy = b.1 - a.1;
        let len = dx.hypot(dy);
        if len < 1e-12 {
            return false;
        }
        let (ux, uy) = (dx / len, dy / len);
        self.segments()
            .filter_map(|s| s.ray_hit(a.0, a.1, ux, uy))
            .any(|t| t < len - 1e-9)
    }

    /// Whether a point lies strictly inside a solid box.
    pub fn inside_obstacle(&self, x: f64, y: f64) -> bool {
        self.boxes
            .iter()
            .any(|b| x > b.xmin && x < b.xmax && y > b.ymin && y < b.ymax)
    }

    /// Parses the plain-text scene format:
    ///
    /// ```text
    /// BOUNDS <xmin> <ymin> <xmax> <ymax>
    /// LANDMARK <id> <x> <y>
    /// WALL <x1> <y1> <x2> <y2>
    /// RECT <xmin> <ymin> <xmax> <ymax>
    /// START <x> <y> <theta>
    /// ```
    ///
    /// `#` starts a comment. `BOUNDS` is required; `RECT` and `START` are optional.
    pub fn parse(text: &str) -> Result<World> {
        let mut bounds = None;
        let mut landmarks = Vec::new();
        let mut walls = Vec::new();
        let mut boxes = Vec::new();
        let mut start = None;
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let body = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = body.split_whitespace().collect();
            let Some((&tag, args)) = toks.split_first() else {
                continue;
            };
            let nums = |expected: usize| -> Result<Vec<f64>> {
                if args.len() != expected {
                    return Err(Error::parse(
                        line_no,
                        format!("{tag} expects {expected} fields, found {}", args.len()),
                    ));
                }
                args.iter()
                    .map(|a| {
                        a.parse::<f64>()
                            .ok()
                            .filter(|v| v.is_finite())
                            .ok_or_else(|| Error::parse(line_no, format!("malformed number '{a}'")))
                    })
                    .collect()
            };
            match tag {
                "BOUNDS" => {
                    let v = nums(4)?;
                    bounds = Some(Rect { xmin: v[0], ymin: v[1], xmax: v[2], ymax: v[3] });
                }
                "LANDMARK" => {
                    if args.len() != 3 {
                        return Err(Error::parse(line_no, "LANDMARK expects 3 fields"));
                    }
                    let id = args[0]
                        .parse::<LandmarkId>()
                        .map_err(|_| Error::parse(line_no, "malformed landmark id"))?;
                    let v = {
                        let rest = &args[1..];
                        rest.iter()
                            .map(|a| a.parse::<f64>().map_err(|_| Error::parse(line_no, "malformed number")))
                            .collect::<Result<Vec<f64>>>()?
                    };
                    landmarks.push(Landmark { id, x: v[0], y: v[1] });
                }
                "WALL" => {
                    let v = nums(4)?;
                    walls.push(Segment::new(v[0], v[1], v[2], v[3]));
                }
                "RECT" => {
                    let v = nums(4)?;
                    boxes.push(Rect {
                        xmin: v[0].min(v[2]),
                        ymin: v[1].min(v[3]),
                        xmax: v[0].max(v[2]),
                        ymax: v[1].max(v[3]),
                    });
                }
                "START" => {
                    let v = nums(3)?;
                    start = Some(Pose2::new(v[0], v[1], v[2]));
                }
                other => return Err(Error::parse(line_no, format!("unknown record '{other}'"))),
            }
        }
        let bounds = bounds.ok_or_else(|| Error::invalid("scene has no BOUNDS record"))?;
        let mut world = World::new(bounds, landmarks, walls, boxes)?;
        world.start = start;
        Ok(world)
    }
}
