// Pure view-model builders. Every number in these structures comes straight
// out of a service response; nothing is recomputed or smoothed client-side.
import { API_SCHEMA } from "./schema.js";
export function trajectoryModel(responses) {
    const points = responses.map((r) => ({
        horizon: r.horizon,
        predicted_h: r.predicted_h,
        clipped: r.clipped,
    }));
    const clipNotices = points
        .filter((p) => p.clipped)
        .map((p) => `horizon ${p.horizon}: held at the current h-index`);
    let polyline = "";
    if (points.length > 0) {
        const xs = points.map((p) => p.horizon);
        const ys = points.map((p) => p.predicted_h);
        const xLo = Math.min(...xs);
        const xSpan = Math.max(Math.max(...xs) - xLo, 1);
        const yLo = Math.min(...ys);
        const ySpan = Math.max(Math.max(...ys) - yLo, 1e-9);
        polyline = points
            .map((p) => {
            const x = 10 + (300 * (p.horizon - xLo)) / xSpan;
            const y = 110 - (100 * (p.predicted_h - yLo)) / ySpan;
            return `${x.toFixed(1)},${y.toFixed(1)}`;
        })
            .join(" ");
    }
    return { points, clipNotices, polyline };
}
export function paperModel(response) {
    const order = API_SCHEMA.endpoints.predict_paper.factor_order;
    const values = order.map((factor) => response.factor_breakdown[factor] ?? 0);
    const largest = Math.max(...values.map(Math.abs), 1e-12);
    const bars = order.map((factor, i) => ({
        factor,
        value: values[i],
        fraction: Math.abs(values[i]) / largest,
    }));
    return {
        probability: response.probability,
        gaugePercent: response.probability * 100,
        primaryAuthor: response.primary_author.name,
        predictedFutureH: response.predicted_future_h,
        bars,
        flags: response.flags,
        modelVersion: response.model_version,
    };
}
