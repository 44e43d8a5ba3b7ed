use serde::Serialize;

use super::point::{haversine, LatLon};
use super::stays::Stay;

/// A cluster of merged stays.
#[derive(Debug, Clone, PartialEq)]
pub struct Poi {
    pub centroid: LatLon,
    pub stays: Vec<Stay>,
}

/// Machine-readable POI line: `{lat, lon, n_stays, t_total_seconds}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoiRecord {
    pub lat: f64,
    pub lon: f64,
    pub n_stays: usize,
    pub t_total_seconds: f64,
}

impl Poi {
    pub fn support(&self) -> usize {
        self.stays.iter().map(|s| s.support).sum()
    }

    pub fn total_duration(&self) -> f64 {
        self.stays.iter().map(Stay::duration).sum()
    }

    pub fn record(&self) -> PoiRecord {
        PoiRecord {
            lat: self.centroid.lat,
            lon: self.centroid.lon,
            n_stays: self.stays.len(),
            t_total_seconds: self.total_duration(),
        }
    }

    /// Collapses the cluster into a single stay-like summary, e.g. to merge
    /// POIs again.
    pub fn as_stay(&self) -> Stay {
        let first = self.stays.iter().min_by(|a, b| a.t_start.total_cmp(&b.t_start)).unwrap();
        let last = self.stays.iter().max_by(|a, b| a.t_end.total_cmp(&b.t_end)).unwrap();
        Stay {
            centroid: self.centroid,
            t_start: first.t_start,
            t_end: last.t_end,
            support: self.support(),
            first: first.first,
            last: last.last,
        }
    }
}

struct Cluster {
    lat_sum: f64,
    lon_sum: f64,
    support: usize,
    t_start: f64,
    index: usize,
    stays: Vec<Stay>,
}

impl Cluster {
    fn centroid(&self) -> LatLon {
        let w = self.support as f64;
        LatLon::new(self.lat_sum / w, self.lon_sum / w)
    }
}

/// Agglomerates stays whose centroids lie within `merge_radius` meters.
///
/// The closest qualifying pair is merged first; its centroid becomes the
/// support-weighted mean of both. Distance ties go to the pair with the
/// earliest `t_start`, then the lowest input index. Stops when no pair is
/// within the radius. POIs come out ordered by their earliest stay.
pub fn merge_stays(stays: &[Stay], merge_radius: f64) -> Vec<Poi> {
    let mut clusters: Vec<Cluster> = stays
        .iter()
        .enumerate()
        .map(|(index, s)| {
            let w = s.support.max(1);
            Cluster {
                lat_sum: s.centroid.lat * w as f64,
                lon_sum: s.centroid.lon * w as f64,
                support: w,
                t_start: s.t_start,
                index,
                stays: vec![*s],
            }
        })
        .collect();

    loop {
        let mut best: Option<(f64, f64, usize, usize, usize)> = None;
        for a in 0..clusters.len() {
            let ca = clusters[a].centroid();
            for b in a + 1..clusters.len() {
                let d = haversine(ca, clusters[b].centroid());
                if d > merge_radius {
                    continue;
                }
                let t = clusters[a].t_start.min(clusters[b].t_start);
                let idx = clusters[a].index.min(clusters[b].index);
                let key = (d, t, idx, a, b);
                let better = match best {
                    None => true,
                    Some((bd, bt, bi, ..)) => d
                        .total_cmp(&bd)
                        .then(t.total_cmp(&bt))
                        .then(idx.cmp(&bi))
                        .is_lt(),
                };
                if better {
                    best = Some(key);
                }
            }
        }
        let Some((.., a, b)) = best else { break };
        let absorbed = clusters.swap_remove(b);
        let keep = &mut clusters[a];
        keep.lat_sum += absorbed.lat_sum;
        keep.lon_sum += absorbed.lon_sum;
        keep.support += absorbed.support;
        keep.t_start = keep.t_start.min(absorbed.t_start);
        keep.index = keep.index.min(absorbed.index);
        keep.stays.extend(absorbed.stays);
    }

    clusters.sort_by(|a, b| a.t_start.total_cmp(&b.t_start).then(a.index.cmp(&b.index)));
    clusters
        .into_iter()
        .map(|mut c| {
            c.stays.sort_by(|a, b| a.t_start.total_cmp(&b.t_start));
            Poi {
                centroid: c.centroid(),
                stays: c.stays,
            }
        })
        .collect()
}
