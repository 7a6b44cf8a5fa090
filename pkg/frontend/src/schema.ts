// Mirror of ../../docs/api_schema.json, the contract shared with the
// prediction service. tests/schema_drift.test.ts fails if the two diverge.

export const API_SCHEMA = {
  "version": 1,
  "error_shape": {
    "error": {
      "code": "string",
      "message": "string",
      "field": "string (optional, request validation only)"
    }
  },
  "endpoints": {
    "health": {
      "method": "GET",
      "path": "/api/v1/health",
      "response_fields": [
        "status",
        "model_versions",
        "corpus_checksum",
        "t",
        "delta_t"
      ]
    },
    "predict_hindex": {
      "method": "POST",
      "path": "/api/v1/predict/hindex",
      "request": {
        "current_h": {
          "type": "integer",
          "min": 0
        },
        "num_papers": {
          "type": "integer",
          "min": 0
        },
        "avg_citations": {
          "type": "number",
          "min": 0
        },
        "num_coauthors": {
          "type": "integer",
          "min": 0
        },
        "years_active": {
          "type": "integer",
          "min": 0
        },
        "horizon_years": {
          "type": "integer",
          "min": 1,
          "max": 10
        }
      },
      "response_fields": [
        "predicted_h",
        "horizon",
        "clipped",
        "model_version"
      ]
    },
    "predict_paper": {
      "method": "POST",
      "path": "/api/v1/predict/paper",
      "request": {
        "title": {
          "type": "string",
          "note": "title and abstract must not both be empty"
        },
        "abstract": {
          "type": "string"
        },
        "year": {
          "type": "integer"
        },
        "primary_mode": {
          "type": "string",
          "enum": [
            "max-h",
            "first"
          ]
        },
        "authors": {
          "type": "array",
          "min_items": 1,
          "items": {
            "name": {
              "type": "string"
            },
            "author_id": {
              "type": "string",
              "note": "corpus id; omit for manual profiles"
            },
            "manual": {
              "h": {
                "type": "integer",
                "min": 0,
                "required_without": "author_id"
              },
              "prior_citations": {
                "type": "array of integers",
                "default": []
              },
              "delta_h": {
                "type": "integer",
                "default": 0
              },
              "num_coauthors": {
                "type": "integer",
                "default": 0
              },
              "years_active": {
                "type": "integer",
                "default": 0
              }
            }
          }
        },
        "venue": {
          "type": "object or string",
          "forms": [
            "string venue name",
            "{\"name\": ...} or {\"venue_id\": ...}",
            "{\"manual\": {\"h_index\": number, \"avg_citations\": number}}"
          ]
        }
      },
      "response_fields": [
        "probability",
        "factor_breakdown",
        "factor_contributions",
        "primary_author",
        "predicted_future_h",
        "model_version",
        "flags"
      ],
      "factor_order": [
        "A-first-max",
        "A-ave-max",
        "A-sum-max",
        "A-first-ratio",
        "A-max-ratio",
        "A-num-authors",
        "C-popularity",
        "C-novelty",
        "C-diversity",
        "C-authority-first",
        "C-authority-max",
        "C-authority-ave",
        "V-h-index",
        "V-citation",
        "S-degree",
        "S-pagerank",
        "S-h-coauthor",
        "S-h-weight",
        "R-h-index",
        "R-citation",
        "T-ave-h",
        "T-max-h",
        "T-h-first",
        "T-h-max"
      ]
    }
  },
  "fixtures": {
    "hindex_request": {
      "current_h": 12,
      "num_papers": 40,
      "avg_citations": 18.5,
      "num_coauthors": 25,
      "years_active": 9,
      "horizon_years": 5
    },
    "hindex_response": {
      "predicted_h": 17.4,
      "horizon": 5,
      "clipped": false,
      "model_version": "a1b2c3d4e5f6"
    },
    "hindex_response_clipped": {
      "predicted_h": 40.0,
      "horizon": 1,
      "clipped": true,
      "model_version": "a1b2c3d4e5f6"
    },
    "paper_request": {
      "title": "Adaptive sampling for sparse citation graphs",
      "abstract": "We propose an adaptive sampler and evaluate it on three corpora.",
      "year": 2007,
      "primary_mode": "max-h",
      "authors": [
        {
          "name": "Ada Author",
          "author_id": "a12"
        },
        {
          "name": "New Person",
          "manual": {
            "h": 3,
            "prior_citations": [
              9,
              4,
              1
            ],
            "delta_h": 1
          }
        }
      ],
      "venue": {
        "name": "Venue A0"
      }
    },
    "paper_response": {
      "probability": 0.77,
      "factor_breakdown": {
        "A-first-max": 12.0,
        "A-ave-max": 7.5,
        "A-sum-max": 15.0,
        "A-first-ratio": 0.41,
        "A-max-ratio": 0.37,
        "A-num-authors": 2.0,
        "C-popularity": 812.3,
        "C-novelty": 0.0,
        "C-diversity": 1.9,
        "C-authority-first": 240.2,
        "C-authority-max": 240.2,
        "C-authority-ave": 155.8,
        "V-h-index": 21.0,
        "V-citation": 9.4,
        "S-degree": 31.0,
        "S-pagerank": 0.0021,
        "S-h-coauthor": 6.5,
        "S-h-weight": 7.1,
        "R-h-index": 0.0,
        "R-citation": 0.0,
        "T-ave-h": 1.5,
        "T-max-h": 3.0,
        "T-h-first": 3.0,
        "T-h-max": 3.0
      },
      "factor_contributions": null,
      "primary_author": {
        "name": "Ada Author",
        "author_id": "a12"
      },
      "predicted_future_h": 16.2,
      "model_version": "f6e5d4c3b2a1",
      "flags": [
        "no-references"
      ]
    },
    "error_response": {
      "error": {
        "code": "invalid-field",
        "message": "current_h must be >= 0",
        "field": "current_h"
      }
    }
  }
} as const;

export type ApiSchema = typeof API_SCHEMA;
