use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::fusion::{associate_frame, interpolate_pose, FusedSample, ResampleConfig};
use crate::quat::Quaternion;
use crate::session::{PoseSample, Timestamp};

/// Incremental counterpart of [`crate::fusion::fuse_streams`].
///
/// Poses and frame timestamps are pushed as they arrive, each stream in
/// its own time order; the two streams may interleave arbitrarily. A grid
/// instant is emitted once both streams have reached it, so the emitted
/// sequence equals the batch result on the same data. Only frames that can
/// still be associated with a future grid instant are retained.
#[derive(Debug)]
pub struct StreamingFuser {
    cfg: ResampleConfig,
    poses: VecDeque<PoseSample>,
    pose_count: usize,
    last_aligned: Option<Quaternion>,
    first_pose_t: Option<u64>,
    last_pose_t: Option<u64>,
    frames: VecDeque<(usize, i64)>,
    frame_count: usize,
    first_frame_t: Option<i64>,
    last_frame_t: Option<i64>,
    next_grid: Option<u64>,
    emitted: usize,
    ready: Vec<FusedSample>,
}

impl StreamingFuser {
    pub fn new(cfg: ResampleConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            poses: VecDeque::new(),
            pose_count: 0,
            last_aligned: None,
            first_pose_t: None,
            last_pose_t: None,
            frames: VecDeque::new(),
            frame_count: 0,
            first_frame_t: None,
            last_frame_t: None,
            next_grid: None,
            emitted: 0,
            ready: Vec::new(),
        })
    }

    pub fn push_pose(&mut self, pose: PoseSample) -> Result<()> {
        if self.last_pose_t.is_some_and(|t| pose.t.0 <= t) {
            return Err(Error::TimestampRegression {
                line: self.pose_count + 2,
            });
        }
        let q = match self.last_aligned {
            Some(prev) if prev.dot(&pose.q) < 0.0 => -pose.q,
            _ => pose.q,
        };
        self.last_aligned = Some(q);
        self.first_pose_t.get_or_insert(pose.t.0);
        self.last_pose_t = Some(pose.t.0);
        self.pose_count += 1;
        self.poses.push_back(PoseSample { t: pose.t, q });
        self.advance();
        Ok(())
    }

    /// Registers the next frame and returns its index in the session.
    pub fn push_frame(&mut self, t: Timestamp) -> Result<usize> {
        let ft = t.0 as i64 + self.cfg.frame_offset_us;
        if self.last_frame_t.is_some_and(|prev| ft <= prev) {
            return Err(Error::TimestampRegression {
                line: self.frame_count + 2,
            });
        }
        let idx = self.frame_count;
        self.frame_count += 1;
        self.first_frame_t.get_or_insert(ft);
        self.last_frame_t = Some(ft);
        self.frames.push_back((idx, ft));
        self.advance();
        Ok(idx)
    }

    /// Takes the samples emitted so far.
    pub fn drain(&mut self) -> Vec<FusedSample> {
        std::mem::take(&mut self.ready)
    }

    pub fn buffered_frames(&self) -> usize {
        self.frames.len()
    }

    pub fn buffered_poses(&self) -> usize {
        self.poses.len()
    }

    /// Ends both streams and returns the samples not yet drained.
    pub fn finish(mut self) -> Result<Vec<FusedSample>> {
        if self.pose_count < 2 {
            return Err(Error::CannotInterpolate(self.pose_count));
        }
        if self.emitted == 0 {
            return Err(Error::NoOverlap);
        }
        Ok(self.drain())
    }

    fn locate_origin(&mut self) -> Option<u64> {
        let start = (self.first_pose_t? as i64).max(self.first_frame_t?);
        while let Some(p) = self.poses.front() {
            if p.t.0 as i64 >= start {
                return Some(p.t.0);
            }
            self.poses.pop_front();
        }
        None
    }

    fn advance(&mut self) {
        loop {
            let t = match self.next_grid {
                Some(t) => t,
                None => match self.locate_origin() {
                    Some(origin) => {
                        self.next_grid = Some(origin);
                        origin
                    }
                    None => return,
                },
            };
            let (Some(pose_end), Some(frame_end)) = (self.last_pose_t, self.last_frame_t) else {
                return;
            };
            if pose_end < t || frame_end < t as i64 {
                return;
            }

            while self.poses.len() >= 2 && self.poses[1].t.0 <= t {
                self.poses.pop_front();
            }
            let q = if self.poses.len() == 1 || self.poses[0].t.0 == t {
                self.poses[0].q
            } else {
                interpolate_pose(&self.poses[0], &self.poses[1], t, self.cfg.pose_policy)
            };

            let ti = t as i64;
            while self.frames.len() >= 2 && self.frames[1].1 <= ti {
                self.frames.pop_front();
            }
            let (before, after) = match self.frames.front() {
                Some(&f) if f.1 <= ti => (Some(f), self.frames.get(1).copied()),
                other => (None, other.copied()),
            };
            self.ready.push(FusedSample {
                t: Timestamp(t),
                q,
                frame: associate_frame(ti, before, after, &self.cfg),
            });
            self.emitted += 1;
            self.next_grid = Some(t + self.cfg.delta_t_us);
        }
    }
}
