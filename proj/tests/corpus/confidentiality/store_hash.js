function store(passwordHash, salt) {
  console.info('stored hash', passwordHash, 'salt', salt);
}

module.exports = { store };

// expect: LoggedVar passwordHash 2 - Logging 2
// expect: LoggedVar salt 2 - Logging 2
