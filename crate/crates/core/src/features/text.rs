/// Edit distance over Unicode scalar values (insert, delete, substitute; unit costs).
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }

    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, &ca) in a.iter().enumerate() {
        let mut diagonal = row[0];
        row[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let substitute = diagonal + usize::from(ca != cb);
            diagonal = row[j + 1];
            row[j + 1] = substitute.min(row[j] + 1).min(diagonal + 1);
        }
    }
    row[b.len()]
}

/// Host part of a profile URL: lowercased, without scheme, leading `www.`,
/// path, query or fragment.
pub fn canonical_host(url: &str) -> String {
    let lower = url.trim().to_lowercase();
    let rest = match lower.find("://") {
        Some(at) => &lower[at + 3..],
        None => lower.as_str(),
    };
    let rest = rest.strip_prefix("www.").unwrap_or(rest);
    let end = rest.find(['/', '?', '#']).unwrap_or(rest.len());
    rest[..end].to_owned()
}

/// Lowercased name with all whitespace removed.
pub fn canonical_name(name: &str) -> String {
    name.chars()
        .filter(|c| !c.is_whitespace())
        .flat_map(char::to_lowercase)
        .collect()
}

/// Distance between the account's website host and its name; low values mean
/// the site is named after the account (self-promotion). Without a website
/// the score is the canonical name length.
pub fn promotion_score(profile_url: Option<&str>, name: &str) -> f64 {
    let name = canonical_name(name);
    match profile_url {
        None => name.chars().count() as f64,
        Some(url) => levenshtein(&canonical_host(url), &name) as f64,
    }
}
