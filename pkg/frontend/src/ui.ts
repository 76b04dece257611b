// Render functions: state + fetched guidance lists in, HTML string out.
// Events are wired through data-action attributes by the controller, so the
// rendering itself stays pure and testable without a browser.

import type { ClassEntry, PropertyEntry } from './types.js'
import type { WizardState } from './state.js'
import { combinatorsEnabled, selectedClass } from './state.js'
import { serializeAtom } from './serialize.js'

export interface GuidanceData {
  classes: ClassEntry[] // children of the current selection (roots at start)
  properties: PropertyEntry[]
  values: string[]
  activeProperty: string | null
  savedConcepts: string[]
  banner: string | null
  fieldError: string | null
}

function esc(text: string): string {
  return text
    .replaceAll('&', '&amp;')
    .replaceAll('<', '&lt;')
    .replaceAll('>', '&gt;')
    .replaceAll('"', '&quot;')
}

function button(action: string, arg: string, label: string, cls = ''): string {
  return `<button class="${cls}" data-action="${esc(action)}" data-arg="${esc(arg)}">${esc(label)}</button>`
}

export function renderBreadcrumbs(state: WizardState): string {
  const crumbs = state.classPath.map((name) => esc(name)).join(' &rsaquo; ')
  const up = state.classPath.length > 0 ? button('pop-class', '', 'up one level') : ''
  return `<div class="crumbs">${crumbs || 'ontology roots'} ${up}</div>`
}

export function renderClassPicker(state: WizardState, data: GuidanceData): string {
  const rows = data.classes.map((entry) => {
    const enter = entry.has_children ? button('enter-class', entry.name, 'open') : ''
    return `<li>${button('pick-class', entry.name, entry.name, 'pick')} ${enter}</li>`
  })
  return `<section id="classes"><h2>1. Clinical concept</h2>
${renderBreadcrumbs(state)}
<ul>${rows.join('')}</ul></section>`
}

export function renderPropertyPicker(state: WizardState, data: GuidanceData): string {
  const current = selectedClass(state)
  if (current === null) {
    return `<section id="properties"><h2>2. Property</h2><p class="hint">pick a concept first</p></section>`
  }
  const rows = data.properties.map((entry) =>
    `<li>${button('pick-property', entry.name, entry.name,
      entry.name === data.activeProperty ? 'pick active' : 'pick')}</li>`)
  return `<section id="properties"><h2>2. Property of ${esc(current)}</h2>
<ul>${rows.join('')}</ul></section>`
}

export function renderAtomBuilder(state: WizardState, data: GuidanceData): string {
  const current = selectedClass(state)
  if (current === null || data.activeProperty === null) {
    return `<section id="atom"><h2>3. Condition</h2><p class="hint">pick a property</p></section>`
  }
  const property = data.activeProperty
  const combinatorChoices = combinatorsEnabled(state)
    ? `<label>join with <select id="combinator">
         <option value="intersection">intersection</option>
         <option value="union">union</option>
       </select></label>`
    : ''
  const classAtoms = [
    button('add-some', `${property}|${current}`, `add: ${property} some ${current}`),
    button('add-only', `${property}|${current}`, `add: ${property} only ${current}`),
  ].join(' ')
  const valueRows = data.values.map((value) => `<li>
    ${button('add-has', `${property}|${value}`, `has ${value}`)}
    ${button('add-has-not', `${property}|${value}`, `has not ${value}`)}
  </li>`)
  const valueBlock = data.values.length > 0
    ? `<ul class="values">${valueRows.join('')}</ul>`
    : `<p class="hint">no recorded values for ${esc(property)}</p>`
  return `<section id="atom"><h2>3. Condition</h2>
${combinatorChoices}
<div class="class-atoms">${classAtoms}</div>
${valueBlock}</section>`
}

export function renderDraft(state: WizardState): string {
  if (state.draft.atoms.length === 0 && state.assertions.length === 0) {
    return `<section id="draft"><h2>4. Criteria</h2><p class="hint">no conditions yet</p></section>`
  }
  const atomBits: string[] = []
  state.draft.atoms.forEach((atom, i) => {
    if (i > 0) atomBits.push(`<em>${esc(state.draft.combinators[i - 1])}</em>`)
    atomBits.push(`<code>${esc(serializeAtom(atom))}</code>`)
  })
  const draftLine = state.draft.atoms.length > 0
    ? `<p>current: ${atomBits.join(' ')} ${button('undo-atom', '', 'undo')}
       ${button('finish-assertion', '', 'finish criterion')}</p>`
    : ''
  const saved = state.assertions.map((text, i) =>
    `<li><code>${esc(text)}</code> ${button('drop-assertion', String(i), 'remove')}</li>`)
  return `<section id="draft"><h2>4. Criteria</h2>
${draftLine}
<ol>${saved.join('')}</ol>
<label>concept name <input id="concept-name" value="${esc(state.conceptName)}"></label>
${button('preview', '', 'preview', 'primary')}
${button('run', '', 'preview + run', 'primary')}
${button('save-concept', '', 'save concept')}</section>`
}

export function renderPreview(state: WizardState): string {
  const t = state.lastTranslation
  if (t === null) {
    return `<section id="preview"><h2>5. Preview</h2><p class="hint">nothing translated yet</p></section>`
  }
  const warnings = t.warnings.length
    ? `<ul class="warnings">${t.warnings.map((w) => `<li>${esc(w)}</li>`).join('')}</ul>`
    : ''
  return `<section id="preview"><h2>5. Preview</h2>
<dl>
<dt>DL</dt><dd><code>${esc(t.dl_text)}</code></dd>
<dt>RA</dt><dd><code>${esc(t.ra_text)}</code></dd>
<dt>SQL</dt><dd><code id="sql">${esc(t.sql)}</code></dd>
</dl>${warnings}</section>`
}

export function renderResult(state: WizardState): string {
  const r = state.lastResult
  if (r === null) {
    return `<section id="result"><h2>6. Result</h2><p class="hint">not executed yet</p></section>`
  }
  const head = r.header.map((h) => `<th>${esc(h)}</th>`).join('')
  const body = r.rows.map((row) =>
    `<tr>${row.map((cell) => `<td>${esc(cell)}</td>`).join('')}</tr>`).join('')
  return `<section id="result"><h2>6. Result (${esc(r.kind)}, ${r.rows.length})</h2>
<table><thead><tr>${head}</tr></thead><tbody>${body}</tbody></table></section>`
}

export function renderSaved(data: GuidanceData): string {
  const rows = data.savedConcepts.map((name) => `<li>
    <span class="name">${esc(name)}</span>
    ${button('run-concept', name, 'run')}
    ${button('delete-concept', name, 'delete')}
  </li>`)
  return `<section id="saved"><h2>Saved concepts</h2><ul>${rows.join('')}</ul></section>`
}

export function renderExpertMode(): string {
  return `<section id="expert"><h2>Expert mode</h2>
<textarea id="expert-text" rows="4" placeholder="raw expression or concept block"></textarea>
${button('expert-translate', '', 'translate', 'primary')}</section>`
}

export function renderApp(state: WizardState, data: GuidanceData): string {
  const banner = data.banner ? `<div class="banner">${esc(data.banner)}</div>` : ''
  const fieldError = data.fieldError ? `<div class="field-error">${esc(data.fieldError)}</div>` : ''
  return `${banner}${fieldError}
<main>
${renderClassPicker(state, data)}
${renderPropertyPicker(state, data)}
${renderAtomBuilder(state, data)}
${renderDraft(state)}
${renderPreview(state)}
${renderResult(state)}
${renderSaved(data)}
${renderExpertMode()}
</main>`
}
