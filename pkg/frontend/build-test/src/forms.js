// Form state <-> API request serialization. The mapping is bijective: a
// request parsed into form state and serialized again is deep-equal to the
// original, which the round-trip tests pin against the schema fixtures.
export function authorFormToRequest(form, horizon) {
    return {
        current_h: Number(form.current_h),
        num_papers: Number(form.num_papers),
        avg_citations: Number(form.avg_citations),
        num_coauthors: Number(form.num_coauthors),
        years_active: Number(form.years_active),
        horizon_years: horizon,
    };
}
export function authorFormFromRequest(request) {
    return {
        current_h: String(request.current_h),
        num_papers: String(request.num_papers),
        avg_citations: String(request.avg_citations),
        num_coauthors: String(request.num_coauthors),
        years_active: String(request.years_active),
    };
}
export function emptyAuthorRow() {
    return {
        name: "",
        author_id: "",
        manual_h: "",
        manual_prior: "",
        manual_delta: "",
        manual_coauthors: "",
        manual_years: "",
    };
}
function rowToAuthor(row) {
    if (row.author_id) {
        return { name: row.name, author_id: row.author_id };
    }
    if (row.manual_h === "") {
        return { name: row.name }; // incomplete: validation will ask for a profile
    }
    const manual = { h: Number(row.manual_h) };
    if (row.manual_prior.trim()) {
        manual.prior_citations = row.manual_prior
            .split(",")
            .map((part) => Number(part.trim()))
            .filter((n) => Number.isFinite(n));
    }
    if (row.manual_delta !== "")
        manual.delta_h = Number(row.manual_delta);
    if (row.manual_coauthors !== "")
        manual.num_coauthors = Number(row.manual_coauthors);
    if (row.manual_years !== "")
        manual.years_active = Number(row.manual_years);
    return { name: row.name, manual };
}
function authorToRow(author) {
    const row = emptyAuthorRow();
    row.name = author.name;
    if (author.author_id) {
        row.author_id = author.author_id;
        return row;
    }
    const manual = author.manual ?? { h: 0 };
    row.manual_h = String(manual.h);
    if (manual.prior_citations !== undefined) {
        row.manual_prior = manual.prior_citations.join(",");
    }
    if (manual.delta_h !== undefined)
        row.manual_delta = String(manual.delta_h);
    if (manual.num_coauthors !== undefined)
        row.manual_coauthors = String(manual.num_coauthors);
    if (manual.years_active !== undefined)
        row.manual_years = String(manual.years_active);
    return row;
}
export function paperFormToRequest(form) {
    const request = {
        title: form.title,
        abstract: form.abstract,
        year: Number(form.year),
        primary_mode: form.primary_mode,
        authors: form.authors.map(rowToAuthor),
    };
    if (form.venue_kind === "manual") {
        request.venue = {
            manual: { h_index: Number(form.venue_h), avg_citations: Number(form.venue_avg) },
        };
    }
    else if (form.venue_name.trim()) {
        request.venue = { name: form.venue_name.trim() };
    }
    return request;
}
export function paperFormFromRequest(request) {
    const form = {
        title: request.title,
        abstract: request.abstract,
        year: String(request.year),
        primary_mode: request.primary_mode,
        venue_kind: "name",
        venue_name: "",
        venue_h: "",
        venue_avg: "",
        authors: request.authors.map(authorToRow),
    };
    const venue = request.venue;
    if (venue && typeof venue === "object" && "manual" in venue) {
        form.venue_kind = "manual";
        form.venue_h = String(venue.manual.h_index);
        form.venue_avg = String(venue.manual.avg_citations);
    }
    else if (typeof venue === "string") {
        form.venue_name = venue;
    }
    else if (venue) {
        form.venue_name = venue.name ?? venue.venue_id ?? "";
    }
    return form;
}
