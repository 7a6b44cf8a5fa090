// Client-side validation. The numeric ranges are read from the shared API
// schema so they cannot drift from what the service enforces; a form that
// passes here is accepted by the service (and vice versa for these fields).
import { API_SCHEMA } from "./schema.js";
const HINDEX_RULES = API_SCHEMA.endpoints.predict_hindex.request;
export function checkNumericField(field, value, rule) {
    if (value === null || value === undefined || value === "" || typeof value === "boolean") {
        return { field, message: `${field} is required` };
    }
    const num = typeof value === "number" ? value : Number(value);
    if (!Number.isFinite(num)) {
        return { field, message: `${field} must be a number` };
    }
    if (rule.type === "integer" && !Number.isInteger(num)) {
        return { field, message: `${field} must be an integer` };
    }
    if (rule.min !== undefined && num < rule.min) {
        return { field, message: `${field} must be >= ${rule.min}` };
    }
    if (rule.max !== undefined && num > rule.max) {
        return { field, message: `${field} must be <= ${rule.max}` };
    }
    return null;
}
/** Validate an author form; empty array means the request may be sent. */
export function validateAuthorForm(form) {
    const errors = [];
    for (const [field, rule] of Object.entries(HINDEX_RULES)) {
        const err = checkNumericField(field, form[field], rule);
        if (err)
            errors.push(err);
    }
    return errors;
}
/** Validate a paper form, mirroring the service's request checks. */
export function validatePaperForm(form) {
    const errors = [];
    if (!form.title.trim() && !form.abstract.trim()) {
        errors.push({ field: "title", message: "title and abstract are both empty" });
    }
    if (!Number.isInteger(form.year)) {
        errors.push({ field: "year", message: "year must be an integer" });
    }
    if (form.primary_mode !== "max-h" && form.primary_mode !== "first") {
        errors.push({ field: "primary_mode", message: "primary_mode must be max-h or first" });
    }
    if (!form.authors.length) {
        errors.push({ field: "authors", message: "at least one author is required" });
    }
    form.authors.forEach((author, i) => {
        if (!author.author_id) {
            const h = author.manual?.h;
            if (h === undefined || !Number.isInteger(h) || h < 0) {
                errors.push({
                    field: `authors.${i}`,
                    message: `${author.name || `author #${i}`} needs a corpus id or a manual profile with h >= 0`,
                });
            }
        }
    });
    return errors;
}
