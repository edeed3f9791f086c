//! From posts to regression inputs and results.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::features::{extract_author_profiles, extract_post_features, AuthorProfile, FeatureError, ProfileContext};
use crate::ingest::{group_timelines, Post};
use crate::matcher::Matcher;
use crate::stats::{encode_design, grid_search_l2, DesignRecord, RegressionResult, RegressionSpec, StatsError};

/// Design records plus the profiles of every author in the input.
#[derive(Debug, Clone, Default)]
pub struct FeatureTables {
    pub records: Vec<DesignRecord>,
    pub profiles: Vec<AuthorProfile>,
}

impl FeatureTables {
    pub fn profile_map(&self) -> HashMap<String, AuthorProfile> {
        self.profiles.iter().map(|p| (p.author_id.clone(), p.clone())).collect()
    }
}

/// One record per match in an original post, in input order.
pub fn design_records(posts: &[Post], matcher: &Matcher) -> Result<Vec<DesignRecord>, FeatureError> {
    let nested: Vec<Vec<DesignRecord>> = posts
        .par_iter()
        .filter(|p| !p.is_retweet)
        .map(|p| {
            matcher
                .match_text(&p.id, &p.author_id, &p.text)
                .into_iter()
                .map(|r| {
                    Ok(DesignRecord {
                        features: extract_post_features(p, &r)?,
                        integrated: r.variant == crate::matcher::Variant::Integrated,
                        post_id: r.post_id,
                        author_id: r.author_id,
                        base: r.base,
                        word_class: r.word_class,
                    })
                })
                .collect::<Result<Vec<_>, FeatureError>>()
        })
        .collect::<Result<_, _>>()?;
    Ok(nested.into_iter().flatten().collect())
}

pub fn build_features(posts: Vec<Post>, matcher: &Matcher, ctx: &ProfileContext<'_>) -> Result<FeatureTables, FeatureError> {
    let records = design_records(&posts, matcher)?;
    let timelines = group_timelines(posts);
    let profiles = extract_author_profiles(timelines.values(), ctx);
    Ok(FeatureTables { records, profiles })
}

/// Encodes the tables for `spec.word_class` and runs the L2 grid search.
pub fn regress(tables: &FeatureTables, spec: &RegressionSpec) -> Result<RegressionResult, StatsError> {
    let design = encode_design(&tables.records, &tables.profile_map(), spec)?;
    grid_search_l2(&design, spec)
}
