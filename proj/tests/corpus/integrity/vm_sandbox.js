const vm = require('vm');

class Sandbox {
  constructor(globals) {
    this.context = vm.createContext(globals);
  }

  run(code) {
    return vm.runInContext(code, this.context);
  }
}

module.exports = Sandbox;

// expect: ApiParam globals 4 Sandbox None -
// expect: ApiParam code 8 run CodeInj 9
