/**
 * Assessor session: the only state that survives a reload is the assessor id.
 * Everything else mirrors the server after each acknowledged request.
 */

const ASSESSOR_KEY = 'poolkit.assessor';

export class Session {
  constructor(private readonly storage: Storage = window.localStorage) {}

  get assessor(): string {
    return this.storage.getItem(ASSESSOR_KEY) ?? '';
  }

  set assessor(value: string) {
    if (value) {
      this.storage.setItem(ASSESSOR_KEY, value);
    } else {
      this.storage.removeItem(ASSESSOR_KEY);
    }
  }
}
