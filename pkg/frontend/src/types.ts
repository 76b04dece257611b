// Wire types for the /api endpoints (field names mirror the JSON schema).

export interface ClassEntry {
  name: string
  parent: string | null
  has_children: boolean
}

export interface PropertyEntry {
  name: string
  domain: string | null
  range: string | null
}

export interface TranslationResponse {
  dl_text: string
  ra_text: string
  sql: string
  warnings: string[]
}

export interface ExecuteResponse {
  kind: 'rows' | 'keys'
  header: string[]
  rows: string[][]
  sql: string
  warnings: string[]
}

export interface ConceptSummary {
  name: string
  created: string
  modified: string
}

export interface ConceptDetail extends ConceptSummary {
  text: string
  assertions: string[]
}

export interface ApiError {
  code: string
  message: string
  position?: number
  line?: number
  suggestions?: string[]
}
